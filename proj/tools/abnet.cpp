#include <abnet/cli/commands.hpp>

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using abnet::cli::CommandResult;

enum class Kind { Uint, Real, Json, Text, Flag };

struct Flag {
    std::string name;  // without leading dashes
    Kind kind;
    std::string help;
};

const std::vector<Flag> kShared{
    {"spec", Kind::Text, "network spec (JSON)"},
    {"seed", Kind::Uint, "master seed; required by randomized commands"},
    {"jobs", Kind::Uint, "worker threads for Monte Carlo batches"},
    {"eps", Kind::Real, "criticality tolerance on |rho| (default 1e-9)"},
    {"pretty", Kind::Flag, "aligned text instead of JSON"},
};

const std::map<std::string, std::pair<std::string, std::vector<Flag>>> kCommands{
    {"validate", {"check MOLI, BFB, environments and primitivity", {}}},
    {"classify", {"spectral report and regime", {}}},
    {"simulate",
     {"legal-driver runs, one JSON line per run",
      {{"eta", Kind::Json, "initial configuration, e.g. '{\"u\":3}' or '[3,3]'"},
       {"q0", Kind::Json, "initial environment (default: first states)"},
       {"runs", Kind::Uint, "number of runs (default 1)"},
       {"max-steps", Kind::Uint, "cutoff per run (default 1e6)"},
       {"snapshot-every", Kind::Uint, "record the configuration every k steps"}}}},
    {"walk",
     {"toppling random walk: drift and excursion statistics",
      {{"eta", Kind::Json, "initial configuration (default: threshold)"},
       {"q0", Kind::Json, "initial environment"},
       {"excursions", Kind::Uint, "number of excursions (default 1e4)"},
       {"excursion-cap", Kind::Uint, "step budget per excursion"}}}},
    {"survive",
     {"survival fraction at a horizon",
      {{"eta", Kind::Json, "initial configuration or 'viable'"},
       {"q0", Kind::Json, "initial environment"},
       {"horizon", Kind::Uint, "steps per run (default 1e5)"},
       {"runs", Kind::Uint, "number of runs (default 1000)"},
       {"viable-horizon", Kind::Uint, "walk horizon per viability trial (default 1000)"},
       {"viable-trials", Kind::Uint, "trials per candidate (default 200)"}}}},
    {"conserved",
     {"detect a conserved quantity and verify it along a trajectory",
      {{"steps", Kind::Uint, "verification trajectory length (default 1000)"}}}},
    {"sweep",
     {"CSV of rho, regime and survival across a template knob",
      {{"template", Kind::Text, "spec template with a \"$name\" knob"},
       {"param", Kind::Text, "knob name"},
       {"grid", Kind::Text, "values: 'a,b,c' or 'start:stop:step'"},
       {"eta", Kind::Json, "initial configuration (default: threshold + 2)"},
       {"horizon", Kind::Uint, "steps per run (default 1e4)"},
       {"runs", Kind::Uint, "runs per grid point (default 100)"}}}},
};

std::string key_of(const std::string& flag) {
    std::string k = flag;
    for (auto& c : k)
        if (c == '-') c = '_';
    return k;
}

json convert(const Flag& f, const std::string& raw) {
    switch (f.kind) {
        case Kind::Uint: {
            std::size_t used = 0;
            unsigned long long v = 0;
            try {
                if (!raw.empty() && raw[0] == '-') throw std::invalid_argument(raw);
                v = std::stoull(raw, &used);
            } catch (const std::exception&) {
                throw abnet::SchemaError("--" + f.name + ": expected a nonnegative integer, got '" + raw + "'");
            }
            if (used != raw.size()) throw abnet::SchemaError("--" + f.name + ": trailing characters in '" + raw + "'");
            return static_cast<std::uint64_t>(v);
        }
        case Kind::Real: {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(raw, &used);
            } catch (const std::exception&) {
                throw abnet::SchemaError("--" + f.name + ": expected a number, got '" + raw + "'");
            }
            if (used != raw.size()) throw abnet::SchemaError("--" + f.name + ": trailing characters in '" + raw + "'");
            return v;
        }
        case Kind::Json: {
            const auto parsed = json::parse(raw, nullptr, false);
            if (parsed.is_discarded()) return raw;  // bare words such as "viable"
            return parsed;
        }
        case Kind::Text:
        case Kind::Flag: break;
    }
    return raw;
}

int emit(const CommandResult& res, const std::string& out_path) {
    if (!res.message.empty()) std::cerr << "abnet: " << res.message << "\n";
    if (out_path.empty()) {
        std::cout << res.output;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            std::cerr << "abnet: cannot write '" << out_path << "'\n";
            return abnet::cli::kInputError;
        }
        out << res.output;
    }
    return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Abelian networks in random environments: criticality, dynamics and walk analysis"};
    app.set_version_flag("--version", abnet::cli::kToolVersion);
    app.require_subcommand(1);

    struct Bound {
        CLI::App* sub;
        std::vector<Flag> flags;
        std::map<std::string, std::string> text;
        std::map<std::string, bool> set;
    };
    std::map<std::string, Bound> bound;
    std::string out_path, manifest_path;

    for (const auto& [name, desc] : kCommands) {
        auto& b = bound[name];
        b.sub = app.add_subcommand(name, desc.first);
        b.flags = kShared;
        b.flags.insert(b.flags.end(), desc.second.begin(), desc.second.end());
        for (const auto& f : b.flags) {
            if (f.kind == Kind::Flag)
                b.sub->add_flag("--" + f.name, b.set[f.name], f.help);
            else
                b.sub->add_option("--" + f.name, b.text[f.name], f.help);
        }
        b.sub->add_option("--out", out_path, "write the primary output to a file");
        b.sub->add_option("--manifest", manifest_path, "write a replayable manifest of this invocation");
    }
    std::string replay_path;
    auto* replay = app.add_subcommand("replay", "rerun a manifest and compare output digests");
    replay->add_option("manifest", replay_path, "manifest file")->required();
    replay->add_option("--out", out_path, "write the replayed output to a file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return abnet::cli::kInputError;
    }

    if (replay->parsed()) {
        std::ifstream in(replay_path);
        if (!in) return emit({abnet::cli::kInputError, "", "cannot open manifest '" + replay_path + "'"}, "");
        const auto manifest = json::parse(in, nullptr, false);
        if (manifest.is_discarded()) return emit({abnet::cli::kInputError, "", "manifest: malformed JSON"}, "");
        return emit(abnet::cli::replay_manifest(manifest), out_path);
    }

    for (auto& [name, b] : bound) {
        if (!b.sub->parsed()) continue;
        json params = json::object();
        try {
            for (const auto& f : b.flags) {
                if (f.kind == Kind::Flag) {
                    if (b.set[f.name]) params[key_of(f.name)] = true;
                } else if (b.sub->count("--" + f.name) > 0) {
                    params[key_of(f.name)] = convert(f, b.text[f.name]);
                }
            }
        } catch (const abnet::InputError& e) {
            return emit({abnet::cli::kInputError, "", e.what()}, "");
        }
        const auto result = abnet::cli::run_command(name, params);
        if (!manifest_path.empty()) {
            std::ofstream mf(manifest_path);
            if (!mf) return emit({abnet::cli::kInputError, "", "cannot write manifest '" + manifest_path + "'"}, "");
            mf << abnet::cli::make_manifest(name, params, result).dump(2) << "\n";
        }
        return emit(result, out_path);
    }
    return abnet::cli::kInputError;
}
