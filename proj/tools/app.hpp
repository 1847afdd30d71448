#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "spdc/config.hpp"

namespace spdc::app {

struct Artifact {
    std::string name;  // relative to the output directory
    std::uintmax_t bytes = 0;
    std::string sha256;
};

// Executes one scenario and writes every artifact plus manifest.json into out_dir.
std::vector<Artifact> run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

// Command-line entry point; returns the process exit status.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

std::string sha256_hex(const std::string& bytes);

}  // namespace spdc::app
