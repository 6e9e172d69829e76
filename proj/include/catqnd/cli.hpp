#pragma once

#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "catqnd/sweep.hpp"

namespace catqnd::cli {

inline constexpr const char* kVersion = "1.0.0";

enum class Command { Fig1a, Fig1b, Fig1c, Fig1d, Fig3, FigS1, FigS2, FigS3, FigS4, Rates, Sweep };
enum class Format { Csv, Json };

const char* command_name(Command c);
std::optional<Command> parse_command(const std::string& name);
const std::vector<Command>& all_commands();

enum class Kind {
    Positive,     // real > 0
    NonNegative,  // real >= 0
    Integer,      // >= min_int
    Grid,         // "a:b:step" or a single value
    List,         // comma-separated reals
    Choice,
};

struct ParamSpec {
    std::string name;  // flag without dashes, also the config key
    Kind kind = Kind::Positive;
    nlohmann::json default_value;
    std::string help;
    std::vector<std::string> choices;
    int min_int = 0;
    bool grid_allows_zero = false;
};

struct CommandSpec {
    Command command;
    std::string summary;
    std::string columns;
    std::vector<ParamSpec> params;
};

const CommandSpec& command_spec(Command c);

struct RunConfig {
    Command command = Command::Fig1b;
    nlohmann::json params = nlohmann::json::object();
    std::string output;  // "" -> <command>.csv / .json, "-" -> stdout without sidecar
    Format format = Format::Csv;
};

struct Diagnostic {
    std::string field;
    std::string message;
};

RunConfig default_config(Command c);

// Ascending values a, a + step, ... <= b. ValidationError names `field`.
std::vector<double> parse_grid(const std::string& text, const std::string& field);
std::vector<double> parse_list(const std::string& text, const std::string& field);

// Every violation at once: types, ranges, grids, truncation rule, dispersive
// guard, resonances up to l-max.
std::vector<Diagnostic> validate(const RunConfig& cfg);

// Dataset for a validated config. Library errors propagate.
SweepResult compute(const RunConfig& cfg);

std::string to_csv(const SweepResult& r);
nlohmann::json config_to_json(const RunConfig& cfg);
// Accepts a bare config object or a sidecar carrying one under "config".
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json sidecar(const RunConfig& cfg, const SweepResult& r);

// 2 for configuration problems, 3 for numerical failures.
int exit_code_for(const std::exception& e);

// Validate, compute and write the dataset (plus a .meta.json sidecar for CSV).
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Full command-line entry point.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace catqnd::cli
