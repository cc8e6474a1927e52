#pragma once

// Command-line front end. `run` is the whole program; tools/pwm_main.cpp only
// forwards argv, so tests drive it in-process.
//
// Exit codes:
//   0 success
//   1 usage error (unknown flag, missing argument, unreadable path)
//   2 malformed scenario/config file or out-of-range value
//   3 unknown estimator
//   4 every candidate is environment-incompatible (report still written)
//   5 machine class above the enumeration cap
//   6 corrupt or mismatched CTM cache

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctm.hpp"
#include "errors.hpp"
#include "estimators.hpp"
#include "ranker.hpp"
#include "report.hpp"
#include "similarity.hpp"
#include "worldstate.hpp"

namespace pwm::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kMalformed = 2,
    kUnknownEstimator = 3,
    kAllIncompatible = 4,
    kCapExceeded = 5,
    kCorruptCache = 6,
};

/// Out-of-range flag or config value.
struct RangeError : Error {
    using Error::Error;
};

struct Settings {
    std::string estimator = "LZ77";
    unsigned ctm_states = 2;
    std::uint64_t ctm_steps = 1000;
    double tau_env = kDefaultTauEnv;
    double tie_eps = kDefaultTieEps;
    std::string kernel = "exp";
    std::string format = "json";
    std::string out;
    std::string config;
    std::string ctm_cache;
    std::string cache_dir;
    bool force = false;
    std::uint64_t cap = ctm::kDefaultEnumerationCap;
    std::vector<std::string> inputs;
    std::vector<int> ticket{kDefaultTicket.begin(), kDefaultTicket.end()};
    std::vector<int> drawn{kDefaultDraw.begin(), kDefaultDraw.end()};
    std::size_t context_bits = 4096;
    std::string emit_fixtures;
};

namespace detail {

/// One configurable value: its CLI option and how to read it from a config file.
struct Knob {
    std::string key;
    CLI::Option* option = nullptr;
    std::function<void(const nlohmann::json&)> assign;
};

template <typename T>
Knob knob(CLI::App& app, const std::string& flag, T& target, const std::string& help) {
    Knob k;
    k.key = flag;
    std::replace(k.key.begin(), k.key.end(), '-', '_');
    k.option = app.add_option("--" + flag, target, help);
    if constexpr (std::is_same_v<T, std::string>) k.option->capture_default_str();
    k.assign = [&target, key = k.key](const nlohmann::json& v) {
        try {
            target = v.get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ScenarioError("config key '" + key + "'", "wrong value type");
        }
    };
    return k;
}

/// Fills every knob the command line left unset from the config file.
inline void apply_config(const std::string& path, const std::vector<Knob>& knobs) {
    std::ifstream in(path);
    if (!in) throw ScenarioError(path, "cannot open config file");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioError(path + ": byte " + std::to_string(e.byte), "invalid JSON");
    }
    if (!doc.is_object()) throw ScenarioError(path, "config must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        auto it = std::find_if(knobs.begin(), knobs.end(), [&](const Knob& k) { return k.key == key; });
        if (it == knobs.end()) throw ScenarioError(path, "unknown config key '" + key + "'");
        if (it->option->count() == 0) it->assign(value);
    }
}

inline ctm::EnumerateOptions cap_only(std::uint64_t cap) {
    ctm::EnumerateOptions o;
    o.cap = cap;
    return o;
}

inline ctm::MachineClass machine_class(const Settings& s) {
    if (s.ctm_states == 0) throw RangeError("--ctm-states must be >= 1");
    if (s.ctm_steps == 0) throw RangeError("--ctm-steps must be >= 1");
    return {s.ctm_states, s.ctm_steps};
}

inline void check_common(const Settings& s) {
    if (s.format != "json" && s.format != "csv") throw RangeError("--format must be json or csv");
    if (!(s.tau_env >= 0.0 && s.tau_env <= 1.0)) throw RangeError("--tau-env must be in [0, 1]");
    if (!(s.tie_eps >= 0.0)) throw RangeError("--tie-eps must be >= 0");
}

inline ProbabilityKernel kernel(const Settings& s) {
    try {
        return parse_kernel(s.kernel);
    } catch (const ConfigError& e) {
        throw RangeError(e.what());
    }
}

inline void emit(const Settings& s, const std::string& text, std::ostream& out) {
    if (s.out.empty()) {
        out << text;
        return;
    }
    std::ofstream f(s.out, std::ios::trunc);
    if (!f) throw Error("cannot write " + s.out);
    f << text;
}

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

inline std::string ranking_csv(const CounterfactualRanking& r) {
    std::string s = "rank,label,distance,delta_si,probability,compatible\n";
    for (std::size_t i = 0; i < r.entries.size(); ++i) {
        const auto& e = r.entries[i];
        s += std::to_string(i + 1) + "," + csv_quote(e.label) + "," + (e.distance ? format_real(*e.distance) : "") + "," +
             format_real(e.delta_si) + "," + format_real(e.probability) + "," + (e.compatible ? "true" : "false") + "\n";
    }
    return s;
}

inline void write_entries(JsonWriter& w, const CounterfactualRanking& r) {
    w.key("entries").begin_array();
    for (const auto& e : r.entries) {
        w.begin_object().field("label", e.label);
        w.key("distance");
        if (e.distance) {
            w.value(*e.distance);
        } else {
            w.null();
        }
        w.field("delta_si", e.delta_si).field("probability", e.probability).field("compatible", e.compatible).end_object();
    }
    w.end_array();
    w.key("plurality_classes").begin_array();
    for (const auto& cls : r.plurality_classes) {
        w.begin_array();
        for (const auto& label : cls) w.value(label);
        w.end_array();
    }
    w.end_array();
}

inline void write_parameters(JsonWriter& w, const Settings& s, const EstimatorId& e) {
    w.key("parameters")
        .begin_object()
        .field("estimator", to_string(e))
        .field("ctm_states", s.ctm_states)
        .field("ctm_steps", s.ctm_steps)
        .field("tau_env", s.tau_env)
        .field("tie_eps", s.tie_eps)
        .field("kernel", s.kernel)
        .end_object();
}

/// Cached distribution if one is configured and present, otherwise a fresh
/// enumeration (saved to --cache-dir when given).
inline ctm::CtmDistribution environments(const Settings& s) {
    auto cls = machine_class(s);
    std::string path = s.ctm_cache;
    if (path.empty() && !s.cache_dir.empty()) path = (std::filesystem::path(s.cache_dir) / ctm::cache_file_name(cls)).string();
    if (!path.empty() && std::filesystem::exists(path)) return ctm::read_cache(path, cls);
    auto d = ctm::enumerate(cls, cap_only(s.cap));
    if (!path.empty()) ctm::write_cache(path, d);
    return d;
}

inline std::vector<std::string> expand_inputs(const std::vector<std::string>& paths, const std::string& skip) {
    std::vector<std::string> files;
    for (const auto& p : paths) {
        if (!std::filesystem::is_directory(p)) {
            files.push_back(p);
            continue;
        }
        std::vector<std::string> found;
        for (const auto& entry : std::filesystem::directory_iterator(p)) {
            if (entry.is_regular_file() && entry.path().extension() == ".json" &&
                !(std::filesystem::exists(skip) && std::filesystem::equivalent(entry.path(), skip))) {
                found.push_back(entry.path().string());
            }
        }
        std::sort(found.begin(), found.end());
        files.insert(files.end(), found.begin(), found.end());
    }
    return files;
}

inline LotteryNumbers lottery_numbers(const std::vector<int>& v, const char* what) {
    if (v.size() != 5) throw RangeError(std::string("--") + what + " takes exactly five numbers");
    LotteryNumbers n{};
    std::copy(v.begin(), v.end(), n.begin());
    return n;
}

// ---------------------------------------------------------------------------

inline int cmd_distance(const Settings& s, std::ostream& out) {
    auto e = parse_estimator(s.estimator);
    auto x = digitalize(load_scenario(s.inputs.at(0)));
    auto y = digitalize(load_scenario(s.inputs.at(1)));
    auto t = similarity_terms(x.payload(), y.payload(), e);
    if (s.format == "csv") {
        emit(s,
             "x,y,k_x,k_y,k_x_given_y,k_y_given_x,similarity\n" + csv_quote(x.label()) + "," + csv_quote(y.label()) + "," +
                 format_real(t.k_x) + "," + format_real(t.k_y) + "," + format_real(t.k_x_given_y) + "," +
                 format_real(t.k_y_given_x) + "," + format_real(t.value) + "\n",
             out);
        return kOk;
    }
    JsonWriter w;
    w.begin_object();
    w.key("parameters").begin_object().field("estimator", to_string(e)).end_object();
    w.field("x", x.label()).field("y", y.label());
    w.field("x_bits", x.payload().size()).field("y_bits", y.payload().size());
    w.field("k_x", t.k_x).field("k_y", t.k_y).field("k_x_given_y", t.k_x_given_y).field("k_y_given_x", t.k_y_given_x);
    w.field("similarity", t.value);
    w.end_object();
    emit(s, w.str(), out);
    return kOk;
}

inline int cmd_rank(const Settings& s, std::ostream& out) {
    RankingRequest req;
    req.estimator = parse_estimator(s.estimator);
    req.ctm_class = machine_class(s);
    req.tau_env = s.tau_env;
    req.tie_eps = s.tie_eps;
    req.kernel = kernel(s);
    const auto& actual_path = s.inputs.at(0);
    req.actual = digitalize(load_scenario(actual_path));
    auto files = expand_inputs({s.inputs.begin() + 1, s.inputs.end()}, actual_path);
    if (files.empty()) throw ScenarioError(s.inputs.back(), "no candidate scenario files found");
    for (const auto& f : files) req.candidates.push_back(digitalize(load_scenario(f)));

    auto ranking = rank(req, environments(s));
    if (s.format == "csv") {
        emit(s, ranking_csv(ranking), out);
    } else {
        JsonWriter w;
        w.begin_object();
        write_parameters(w, s, req.estimator);
        w.field("actual", req.actual.label());
        write_entries(w, ranking);
        w.end_object();
        emit(s, w.str(), out);
    }
    return ranking.empty_compatible() ? kAllIncompatible : kOk;
}

inline int cmd_ctm(const Settings& s, std::ostream& out) {
    auto cls = machine_class(s);
    auto path = !s.out.empty()         ? s.out
                : !s.ctm_cache.empty() ? s.ctm_cache
                                       : (std::filesystem::path(s.cache_dir.empty() ? "." : s.cache_dir) /
                                          ctm::cache_file_name(cls))
                                             .string();
    std::string status = "written";
    ctm::CtmDistribution d;
    if (!s.force && std::filesystem::exists(path)) {
        d = ctm::read_cache(path, cls);
        status = "verified";
    } else {
        if (auto parent = std::filesystem::path(path).parent_path(); !parent.empty()) std::filesystem::create_directories(parent);
        d = ctm::enumerate(cls, cap_only(s.cap));
        ctm::write_cache(path, d);
    }
    JsonWriter w;
    w.begin_object()
        .field("status", status)
        .field("path", path)
        .field("ctm_states", cls.states)
        .field("ctm_steps", cls.step_budget)
        .field("machines", ctm::class_size(cls.states))
        .field("halting", d.halting_machines())
        .field("outputs", d.outputs().size())
        .end_object();
    out << w.str();
    return kOk;
}

inline void emit_fixtures(const std::string& dir, const LotteryNumbers& drawn, const LotteryOptions& opt) {
    namespace fs = std::filesystem;
    auto context = random_bits(opt.context_bits, opt.context_seed);
    fs::create_directories(fs::path(dir) / "candidates");
    save_scenario((fs::path(dir) / "actual.json").string(), lottery_scenario(drawn, context));
    for (const auto& w : lottery_counterfactuals(drawn)) {
        save_scenario((fs::path(dir) / "candidates" / (lottery_label(w) + ".json")).string(), lottery_scenario(w, context));
    }
}

inline int cmd_demo_lottery(const Settings& s, std::ostream& out) {
    LotteryOptions opt;
    opt.estimator = parse_estimator(s.estimator);
    opt.ctm_class = machine_class(s);
    opt.tau_env = s.tau_env;
    opt.tie_eps = s.tie_eps;
    opt.context_bits = s.context_bits;
    auto ticket = lottery_numbers(s.ticket, "ticket");
    auto drawn = lottery_numbers(s.drawn, "drawn");
    auto rep = lottery_demo(ticket, drawn, opt);
    if (!s.emit_fixtures.empty()) emit_fixtures(s.emit_fixtures, drawn, opt);

    if (s.format == "csv") {
        emit(s, ranking_csv(rep.ranking), out);
        return kOk;
    }
    JsonWriter w;
    w.begin_object();
    write_parameters(w, s, opt.estimator);
    w.key("ticket").begin_array();
    for (auto n : rep.ticket) w.value(n);
    w.end_array();
    w.key("drawn").begin_array();
    for (auto n : rep.drawn) w.value(n);
    w.end_array();
    w.key("numbers").begin_array();
    for (const auto& row : rep.numbers) {
        w.begin_object()
            .field("number", row.number)
            .field("bits", row.bits.to_text())
            .field("complexity", row.complexity)
            .field("deficiency", row.deficiency)
            .field("probability", row.probability)
            .end_object();
    }
    w.end_array();
    w.field("actual", rep.actual.label());
    w.key("winning_world");
    if (rep.winning_world) {
        w.value(*rep.winning_world);
    } else {
        w.null();
    }
    w.field("actual_is_winner", rep.actual_is_winner).field("note", rep.note);
    write_entries(w, rep.ranking);
    w.end_object();
    emit(s, w.str(), out);
    return kOk;
}

} // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Settings s;
    CLI::App app{"Possible-worlds counterfactual ranking by algorithmic similarity", "pwm"};
    app.require_subcommand(1);

    std::map<CLI::App*, std::vector<detail::Knob>> knobs;
    auto common = [&](CLI::App* sub, bool ranking) {
        auto& k = knobs[sub];
        k.push_back(detail::knob(*sub, "estimator", s.estimator, "RLE, LZ78, ENTROPY0 or LZ77"));
        k.push_back(detail::knob(*sub, "format", s.format, "json or csv"));
        sub->add_option("--out", s.out, "write the report here instead of stdout");
        sub->add_option("--config", s.config, "JSON file of defaults; flags take precedence")->check(CLI::ExistingFile);
        if (!ranking) return;
        k.push_back(detail::knob(*sub, "ctm-states", s.ctm_states, "states per enumerated machine"));
        k.push_back(detail::knob(*sub, "ctm-steps", s.ctm_steps, "step budget per machine"));
        k.push_back(detail::knob(*sub, "tau-env", s.tau_env, "maximum delta-SI for a compatible candidate"));
        k.push_back(detail::knob(*sub, "tie-eps", s.tie_eps, "distance gap that separates plurality classes"));
        k.push_back(detail::knob(*sub, "kernel", s.kernel, "exp or reciprocal"));
        k.push_back(detail::knob(*sub, "cap", s.cap, "largest machine class to enumerate"));
        k.push_back(detail::knob(*sub, "cache-dir", s.cache_dir, "directory for CTM cache files"));
        sub->add_option("--ctm-cache", s.ctm_cache, "CTM cache file to read, or to create if absent");
    };

    auto* distance = app.add_subcommand("distance", "similarity score between two scenario files");
    distance->add_option("inputs", s.inputs, "two scenario files")->required()->expected(2)->check(CLI::ExistingFile);
    common(distance, false);

    auto* rank_cmd = app.add_subcommand("rank", "rank candidate worlds against an actual world");
    rank_cmd->add_option("inputs", s.inputs, "actual scenario, then candidate files or directories")
        ->required()
        ->expected(2, -1)
        ->check(CLI::ExistingPath);
    common(rank_cmd, true);

    auto* ctm_cmd = app.add_subcommand("ctm", "enumerate a machine class and write or verify its cache");
    common(ctm_cmd, true);
    ctm_cmd->add_flag("--force", s.force, "re-enumerate even if a cache exists");

    auto* lottery = app.add_subcommand("demo-lottery", "five-number binary lottery demonstration");
    common(lottery, true);
    knobs[lottery].push_back(detail::knob(*lottery, "ticket", s.ticket, "five numbers in [0, 255]"));
    knobs[lottery].push_back(detail::knob(*lottery, "drawn", s.drawn, "five distinct numbers in [0, 255]"));
    knobs[lottery].push_back(detail::knob(*lottery, "context-bits", s.context_bits, "shared background bits per world"));
    lottery->get_option("--ticket")->delimiter(',')->expected(1, 5);
    lottery->get_option("--drawn")->delimiter(',')->expected(1, 5);
    lottery->add_option("--emit-fixtures", s.emit_fixtures, "also write the actual and candidate scenario files here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        auto* sub = app.get_subcommands().front();
        if (!s.config.empty()) detail::apply_config(s.config, knobs[sub]);
        detail::check_common(s);
        if (sub == distance) return detail::cmd_distance(s, out);
        if (sub == rank_cmd) return detail::cmd_rank(s, out);
        if (sub == ctm_cmd) return detail::cmd_ctm(s, out);
        return detail::cmd_demo_lottery(s, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUnknownEstimator;
    } catch (const CapExceeded& e) {
        err << "error: " << e.what() << "\nhint: raise --cap or lower --ctm-states\n";
        return kCapExceeded;
    } catch (const CacheError& e) {
        err << "error: " << e.what() << "\nhint: delete the cache file or rerun `pwm ctm --force` to re-enumerate\n";
        return kCorruptCache;
    } catch (const ScenarioError& e) {
        err << "error: " << e.what() << '\n';
        return kMalformed;
    } catch (const FieldOverflow& e) {
        err << "error: " << e.what() << '\n';
        return kMalformed;
    } catch (const StructuralError& e) {
        err << "error: " << e.what() << '\n';
        return kMalformed;
    } catch (const RangeError& e) {
        err << "error: " << e.what() << '\n';
        return kMalformed;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << '\n';
        return kMalformed;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kMalformed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kMalformed;
    }
}

} // namespace pwm::cli
