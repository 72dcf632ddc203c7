#include "erdy/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace erdy {

namespace {

using nlohmann::json;

[[noreturn]] void missing(const std::string& key, const std::string& section) {
    throw invalid_config("missing required key \"" + key + "\" in section \"" + section + "\"");
}

void reject_unknown(const json& obj, const std::string& section,
                    std::initializer_list<const char*> known) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok)
            throw invalid_config("unknown key \"" + key + "\" in section \"" + section + "\"");
    }
}

const json& need(const json& obj, const char* key, const std::string& section) {
    const auto it = obj.find(key);
    if (it == obj.end()) missing(key, section);
    return *it;
}

double as_number(const json& v, const std::string& what) {
    if (!v.is_number()) throw invalid_config(what + " must be a number");
    return v.get<double>();
}

std::int64_t as_integer(const json& v, const std::string& what) {
    if (!v.is_number_integer()) throw invalid_config(what + " must be an integer");
    return v.get<std::int64_t>();
}

bool as_bool(const json& v, const std::string& what) {
    if (!v.is_boolean()) throw invalid_config(what + " must be a boolean");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& what) {
    if (!v.is_string()) throw invalid_config(what + " must be a string");
    return v.get<std::string>();
}

std::shared_ptr<const rate_model> parse_model(const json& m) {
    reject_unknown(m, "model", {"type", "parameters"});
    const std::string type = as_string(need(m, "type", "model"), "model.type");
    const json& p = need(m, "parameters", "model");
    if (!p.is_object()) throw invalid_config("model.parameters must be an object");
    std::vector<std::pair<std::string, double>> params;
    for (const auto& [key, value] : p.items())
        params.emplace_back(key, as_number(value, "model.parameters." + key));
    return make_model(type, params);
}

weight_distribution parse_weights(const json& w) {
    const std::string type = as_string(need(w, "type", "graph.weights"), "graph.weights.type");
    if (type == "constant") {
        reject_unknown(w, "graph.weights", {"type", "value"});
        return weight_distribution::constant(
            as_number(need(w, "value", "graph.weights"), "graph.weights.value"));
    }
    if (type == "unit" || type == "bernoulli") {
        reject_unknown(w, "graph.weights", {"type"});
        return weight_distribution::unit();
    }
    if (type == "exponential") {
        reject_unknown(w, "graph.weights", {"type", "mean"});
        return weight_distribution::exponential(
            as_number(need(w, "mean", "graph.weights"), "graph.weights.mean"));
    }
    if (type == "uniform") {
        reject_unknown(w, "graph.weights", {"type", "lo", "hi"});
        return weight_distribution::uniform(
            as_number(need(w, "lo", "graph.weights"), "graph.weights.lo"),
            as_number(need(w, "hi", "graph.weights"), "graph.weights.hi"));
    }
    if (type == "lognormal") {
        reject_unknown(w, "graph.weights", {"type", "logmean", "logsd"});
        return weight_distribution::lognormal(
            as_number(need(w, "logmean", "graph.weights"), "graph.weights.logmean"),
            as_number(need(w, "logsd", "graph.weights"), "graph.weights.logsd"));
    }
    throw invalid_config("unknown weight distribution type: " + type);
}

run_config::graph_section parse_graph(const json& g) {
    reject_unknown(g, "graph", {"n", "p", "weights", "seed"});
    run_config::graph_section sec;
    if (g.contains("n")) sec.n = as_integer(g["n"], "graph.n");
    sec.edge_prob = as_number(need(g, "p", "graph"), "graph.p");
    if (g.contains("weights")) {
        if (!g["weights"].is_object()) throw invalid_config("graph.weights must be an object");
        sec.weights = parse_weights(g["weights"]);
    }
    if (g.contains("seed"))
        sec.seed = static_cast<std::uint64_t>(as_integer(g["seed"], "graph.seed"));
    return sec;
}

run_config::dynamics_section parse_dynamics(const json& d) {
    reject_unknown(d, "dynamics",
                   {"horizon", "u0", "init", "init_mode", "sample_points", "seed", "abs_tol",
                    "rel_tol"});
    run_config::dynamics_section sec;
    sec.horizon = as_number(need(d, "horizon", "dynamics"), "dynamics.horizon");
    if (!(sec.horizon > 0.0)) throw invalid_config("dynamics.horizon must be positive");
    const bool has_u0 = d.contains("u0");
    const bool has_init = d.contains("init");
    if (has_u0 == has_init)
        throw invalid_config("dynamics needs exactly one of \"u0\" and \"init\"");
    if (has_u0) {
        for (const auto& v : d["u0"]) sec.u0.push_back(as_number(v, "dynamics.u0 entry"));
        if (sec.u0.size() < 2) throw invalid_config("dynamics.u0 needs at least two entries");
    } else {
        for (const auto& v : d["init"]) {
            const auto s = as_integer(v, "dynamics.init entry");
            if (s < 0 || s > 255) throw invalid_config("dynamics.init entries must be state indices");
            sec.init.push_back(static_cast<std::uint8_t>(s));
        }
        if (sec.init.empty()) throw invalid_config("dynamics.init must be nonempty");
    }
    if (d.contains("init_mode")) {
        const auto mode = as_string(d["init_mode"], "dynamics.init_mode");
        if (mode == "deterministic") sec.mode = init_mode::deterministic;
        else if (mode == "multinomial") sec.mode = init_mode::multinomial;
        else throw invalid_config("dynamics.init_mode must be deterministic or multinomial");
    }
    if (d.contains("sample_points")) {
        sec.sample_points = static_cast<int>(as_integer(d["sample_points"], "dynamics.sample_points"));
        if (sec.sample_points < 2)
            throw invalid_config("dynamics.sample_points must be at least 2");
    }
    if (d.contains("seed"))
        sec.seed = static_cast<std::uint64_t>(as_integer(d["seed"], "dynamics.seed"));
    if (d.contains("abs_tol")) sec.abs_tol = as_number(d["abs_tol"], "dynamics.abs_tol");
    if (d.contains("rel_tol")) sec.rel_tol = as_number(d["rel_tol"], "dynamics.rel_tol");
    if (!(sec.abs_tol > 0.0) || !(sec.rel_tol >= 0.0))
        throw invalid_config("dynamics tolerances must be positive");
    return sec;
}

diagnostics_toggle parse_diagnostics(const json& d) {
    reject_unknown(d, "study.diagnostics", {"r1", "r2", "r2_pairs", "r2_cap", "k", "h",
                                            "gronwall", "nimfa"});
    diagnostics_toggle diag;
    if (d.contains("r1")) diag.r1 = as_bool(d["r1"], "study.diagnostics.r1");
    if (d.contains("r2")) diag.r2 = as_string(d["r2"], "study.diagnostics.r2");
    if (d.contains("r2_pairs"))
        diag.r2_pairs = as_integer(d["r2_pairs"], "study.diagnostics.r2_pairs");
    if (d.contains("r2_cap")) diag.r2_cap = as_integer(d["r2_cap"], "study.diagnostics.r2_cap");
    if (d.contains("k")) diag.k = as_bool(d["k"], "study.diagnostics.k");
    if (d.contains("h")) diag.h = as_bool(d["h"], "study.diagnostics.h");
    if (d.contains("gronwall")) diag.gronwall = as_bool(d["gronwall"], "study.diagnostics.gronwall");
    if (d.contains("nimfa")) diag.nimfa = as_bool(d["nimfa"], "study.diagnostics.nimfa");
    return diag;
}

run_config::study_section parse_study(const json& s) {
    reject_unknown(s, "study", {"ladder", "replications", "master_seed", "diagnostics"});
    run_config::study_section sec;
    for (const auto& v : need(s, "ladder", "study"))
        sec.ladder.push_back(as_integer(v, "study.ladder entry"));
    if (sec.ladder.empty()) throw invalid_config("study.ladder must be nonempty");
    sec.replications =
        static_cast<int>(as_integer(need(s, "replications", "study"), "study.replications"));
    sec.master_seed = static_cast<std::uint64_t>(
        as_integer(need(s, "master_seed", "study"), "study.master_seed"));
    if (s.contains("diagnostics")) {
        if (!s["diagnostics"].is_object())
            throw invalid_config("study.diagnostics must be an object");
        sec.diag = parse_diagnostics(s["diagnostics"]);
    }
    return sec;
}

} // namespace

graph_params run_config::graph_parameters() const {
    if (!graph) missing("graph", "config");
    if (!graph->n) missing("n", "graph");
    if (!graph->seed) missing("seed", "graph");
    graph_params params{*graph->n, graph->edge_prob, graph->weights, *graph->seed};
    params.validate();
    return params;
}

run_config parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw invalid_config(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw invalid_config("config root must be a JSON object");
    reject_unknown(doc, "config", {"model", "graph", "dynamics", "study", "output"});

    run_config cfg;
    if (doc.contains("model")) cfg.model = parse_model(doc["model"]);
    if (doc.contains("graph")) cfg.graph = parse_graph(doc["graph"]);
    if (doc.contains("dynamics")) cfg.dynamics = parse_dynamics(doc["dynamics"]);
    if (doc.contains("study")) cfg.study = parse_study(doc["study"]);
    if (doc.contains("output")) {
        reject_unknown(doc["output"], "output", {"directory", "formats"});
        if (doc["output"].contains("directory"))
            cfg.output_directory = as_string(doc["output"]["directory"], "output.directory");
        if (doc["output"].contains("formats"))
            for (const auto& f : doc["output"]["formats"])
                if (as_string(f, "output.formats entry") != "csv")
                    throw invalid_config("only csv output is supported");
    }
    return cfg;
}

run_config parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_config("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

} // namespace erdy
