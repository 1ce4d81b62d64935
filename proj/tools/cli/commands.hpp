#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tequiv/io/json_io.hpp"

namespace tequiv::cli {

struct Globals {
    bool json = false;
    std::uint64_t seed = 0;
    int rank_cap = kDefaultRankCap;
    std::string q_cap = "65536";
    std::string m_cap = "64";
    bool parallel = false;
};

/// What a command produced: the payload for --json, text otherwise.
struct Outcome {
    io::json payload;
    std::string text;
    int exit_code = 0;
    /// Extra bytes hashed into input_hash (input files).
    std::string input_bytes;
};

using Action = std::function<Outcome()>;

/// Each registers its subcommands on `app`; the chosen one stores its action.
void add_sing(CLI::App& app, const Globals& g, Action& action);
void add_lens(CLI::App& app, const Globals& g, Action& action);
void add_obstruct(CLI::App& app, const Globals& g, Action& action);
void add_cover(CLI::App& app, const Globals& g, Action& action);
void add_actions(CLI::App& app, const Globals& g, Action& action);
void add_construct(CLI::App& app, const Globals& g, Action& action);

std::string read_file(const std::string& path);

}  // namespace tequiv::cli
