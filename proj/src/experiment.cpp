#include "homsim/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "homsim/wfm.hpp"

namespace homsim {

namespace fs = std::filesystem;

namespace {

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed JSON in " + path + ": " + e.what());
    }
}

void write_json_file(const json& j, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const char* ctx) {
    if (!obj.is_object()) throw ConfigError(std::string(ctx) + ": expected a JSON object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(std::string(ctx) + ": unknown key '" + it.key() + "'");
}

double require_number(const json& obj, const char* key, const char* ctx) {
    if (!obj.contains(key))
        throw ConfigError(std::string(ctx) + ": missing required key '" + key + "'");
    if (!obj.at(key).is_number())
        throw ConfigError(std::string(ctx) + ": '" + key + "' must be a number");
    return obj.at(key).get<double>();
}

struct BasisConfig {
    std::vector<int> l;
    int p = 0;
    double waist = 4.5e-4;
    int grid_n = 256;
    double pitch = 2.0e-5;
    double wavelength = 810e-9;
};

BasisConfig parse_basis(const json& cfg) {
    if (!cfg.contains("basis")) throw ConfigError("config: missing 'basis' section");
    const json& b = cfg.at("basis");
    check_keys(b, {"l", "p", "waist", "grid_n", "grid_pitch", "wavelength"}, "basis");
    BasisConfig out;
    if (!b.contains("l") || !b.at("l").is_array() || b.at("l").empty())
        throw ConfigError("basis: 'l' must be a non-empty array of OAM indices");
    out.l = b.at("l").get<std::vector<int>>();
    for (std::size_t i = 1; i < out.l.size(); ++i)
        if (out.l[i] <= out.l[i - 1])
            throw ConfigError("basis: 'l' must be strictly ascending");
    out.p = b.value("p", 0);
    out.waist = b.value("waist", 4.5e-4);
    out.grid_n = b.value("grid_n", 256);
    out.pitch = b.value("grid_pitch", 2.0e-5);
    out.wavelength = b.value("wavelength", 810e-9);
    return out;
}

Basis realize_basis(const BasisConfig& bc) {
    Grid grid{bc.grid_n, bc.grid_n, bc.pitch, bc.pitch};
    std::vector<ModeSpec> specs;
    for (int l : bc.l) specs.push_back(ModeSpec::lg(l, bc.p, bc.waist));
    return build_basis(specs, grid, bc.wavelength);
}

struct GammaConfig {
    bool is_kernel = true;
    double fixed = 1.0;
    double d1 = 1.2e13;
    double d2 = 3.0e12;
};

GammaConfig parse_gamma(const json& cfg) {
    GammaConfig g;
    if (!cfg.contains("gamma")) return g;
    const json& j = cfg.at("gamma");
    if (j.is_number()) {
        g.is_kernel = false;
        g.fixed = j.get<double>();
        if (g.fixed < -1.0 || g.fixed > 1.0)
            throw ConfigError("gamma: fixed value must lie in [-1, 1]");
        return g;
    }
    check_keys(j, {"d1", "d2"}, "gamma");
    g.d1 = require_number(j, "d1", "gamma");
    g.d2 = require_number(j, "d2", "gamma");
    if (g.d2 < 0.0) throw ConfigError("gamma: d2 must be non-negative");
    return g;
}

std::string sanitize_label(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c))) out += c;
        else if (c == '+') out += 'p';
        else if (c == '-') out += 'm';
        else out += '_';
    }
    return out.empty() ? "x" : out;
}

struct ProjectorPair {
    std::string label1, label2;
    Eigen::VectorXcd p1, p2;
};

struct SetupBundle {
    Eigen::MatrixXcd U;
    int dim = 0;
    std::vector<int> basis_l;
    Eigen::VectorXcd in1, in2;
    std::string in1_label, in2_label;
    std::vector<ProjectorPair> pairs;
};

SetupBundle parse_setup(const json& cfg) {
    SetupBundle s;
    if (!cfg.contains("unitary")) throw ConfigError("config: missing 'unitary'");
    s.U = resolve_unitary(cfg.at("unitary"));
    s.dim = static_cast<int>(s.U.rows());

    if (cfg.contains("basis")) {
        const BasisConfig bc = parse_basis(cfg);
        if (static_cast<int>(bc.l.size()) != s.dim)
            throw ConfigError("config: basis has " + std::to_string(bc.l.size()) +
                              " modes but the unitary is " + std::to_string(s.dim) + "-dimensional");
        s.basis_l = bc.l;
    } else {
        s.basis_l = default_basis_l(s.dim);
    }

    json inputs = cfg.contains("inputs") ? cfg.at("inputs") : json::array();
    if (inputs.empty()) {
        inputs = json::array({"m0", "m" + std::to_string(s.dim - 1)});
    }
    if (!inputs.is_array() || inputs.size() != 2)
        throw ConfigError("config: 'inputs' must list exactly two states");
    s.in1 = resolve_state(inputs.at(0), s.dim, s.basis_l);
    s.in2 = resolve_state(inputs.at(1), s.dim, s.basis_l);
    s.in1_label = state_label(inputs.at(0));
    s.in2_label = state_label(inputs.at(1));

    json projectors = cfg.contains("projectors") ? cfg.at("projectors") : json("all_pairs");
    if (projectors.is_string() && projectors.get<std::string>() == "all_pairs") {
        projectors = json::array();
        for (int i = 0; i < s.dim; ++i)
            for (int j = 0; j < s.dim; ++j)
                projectors.push_back(json::array(
                    {"l" + std::to_string(s.basis_l[i]), "l" + std::to_string(s.basis_l[j])}));
    }
    if (!projectors.is_array() || projectors.empty())
        throw ConfigError("config: 'projectors' must be \"all_pairs\" or a list of pairs");
    for (const auto& pr : projectors) {
        if (!pr.is_array() || pr.size() != 2)
            throw ConfigError("config: each projector entry must be a pair");
        ProjectorPair pp;
        pp.p1 = resolve_state(pr.at(0), s.dim, s.basis_l);
        pp.p2 = resolve_state(pr.at(1), s.dim, s.basis_l);
        pp.label1 = state_label(pr.at(0));
        pp.label2 = state_label(pr.at(1));
        s.pairs.push_back(std::move(pp));
    }
    return s;
}

struct ScanConfig {
    double rate_scale = 3600.0;
    double delay_start = -1.5e-12, delay_stop = 1.5e-12;
    int points = 61;
    double dwell = 5.0;
    double singles1 = 2.0e5, singles2 = 2.0e5;
    double window = 1e-9;
    double slope = 0.0;
    bool noise = true;
    double drift_fraction = 0.0;
    double singles_dip_fraction = 0.0;
};

ScanConfig parse_scan(const json& cfg) {
    ScanConfig sc;
    if (!cfg.contains("scan")) return sc;
    const json& j = cfg.at("scan");
    check_keys(j,
               {"rate_scale", "delay_start", "delay_stop", "points", "dwell", "singles",
                "window", "slope", "noise", "drift_fraction", "singles_dip_fraction"},
               "scan");
    sc.rate_scale = j.value("rate_scale", sc.rate_scale);
    sc.delay_start = j.value("delay_start", sc.delay_start);
    sc.delay_stop = j.value("delay_stop", sc.delay_stop);
    sc.points = j.value("points", sc.points);
    sc.dwell = j.value("dwell", sc.dwell);
    if (j.contains("singles")) {
        const auto v = j.at("singles").get<std::vector<double>>();
        if (v.size() != 2) throw ConfigError("scan: 'singles' must hold two rates");
        sc.singles1 = v[0];
        sc.singles2 = v[1];
    }
    sc.window = j.value("window", sc.window);
    sc.slope = j.value("slope", sc.slope);
    sc.noise = j.value("noise", true);
    sc.drift_fraction = j.value("drift_fraction", 0.0);
    sc.singles_dip_fraction = j.value("singles_dip_fraction", 0.0);
    if (!(sc.rate_scale > 0.0)) throw ConfigError("scan: rate_scale must be positive");
    return sc;
}

fs::path out_dir(const json& cfg) {
    const std::string dir = cfg.value("out", "out");
    fs::create_directories(dir);
    return fs::path(dir);
}

// prediction for one projector pair
struct PairPrediction {
    double r_classical, r_quantum, vis;
    InterferenceKind kind;
};

PairPrediction predict_pair(const SetupBundle& s, const ProjectorPair& pp, double gamma_q) {
    PairSetup setup{s.U, s.in1, s.in2, pp.p1, pp.p2, 0.0};
    PairPrediction out{};
    out.r_classical = coincidence_rate(setup);
    setup.gamma = gamma_q;
    out.r_quantum = coincidence_rate(setup);
    out.kind = classify(out.r_classical, out.r_quantum, 1e-12);
    out.vis = out.r_classical > 0.0
                  ? (out.kind == InterferenceKind::none
                         ? 0.0
                         : visibility(out.r_classical, out.r_quantum, out.kind))
                  : 0.0;
    return out;
}

json cmd_predict(const json& cfg) {
    const SetupBundle s = parse_setup(cfg);
    const GammaConfig g = parse_gamma(cfg);
    const double gamma_q = g.is_kernel ? 1.0 : g.fixed;

    json table = json::array();
    std::string csv = "proj1,proj2,r_classical,r_quantum,visibility,kind\n";
    char buf[256];
    for (const auto& pp : s.pairs) {
        const PairPrediction pr = predict_pair(s, pp, gamma_q);
        table.push_back(json{{"projector", json::array({pp.label1, pp.label2})},
                             {"r_classical", pr.r_classical},
                             {"r_quantum", pr.r_quantum},
                             {"visibility", pr.vis},
                             {"kind", to_string(pr.kind)}});
        std::snprintf(buf, sizeof(buf), "%s,%s,%.17g,%.17g,%.17g,%s\n", pp.label1.c_str(),
                      pp.label2.c_str(), pr.r_classical, pr.r_quantum, pr.vis,
                      to_string(pr.kind));
        csv += buf;
    }

    // artifact names are relative to the out directory so identical configs
    // produce byte-identical files wherever they land
    json summary{{"command", "predict"},
                 {"unitary_dim", s.dim},
                 {"inputs", json::array({s.in1_label, s.in2_label})},
                 {"gamma_quantum", gamma_q},
                 {"table", table},
                 {"artifacts", json::array({"predict.json", "predict.csv"})}};
    const fs::path dir = out_dir(cfg);
    write_json_file(summary, dir / "predict.json");
    std::ofstream csvf(dir / "predict.csv");
    if (!csvf) throw ConfigError("cannot write predict.csv");
    csvf << csv;
    return summary;
}

json cmd_scan(const json& cfg) {
    const SetupBundle s = parse_setup(cfg);
    const GammaConfig g = parse_gamma(cfg);
    if (!g.is_kernel)
        throw ConfigError("scan: 'gamma' must provide the delay kernel {d1, d2}");
    const ScanConfig sc = parse_scan(cfg);
    const std::uint64_t seed = cfg.value("seed", 1ULL);
    const fs::path dir = out_dir(cfg);

    json entries = json::array();
    json artifacts = json::array();
    int k = 0;
    for (const auto& pp : s.pairs) {
        const PairPrediction pr = predict_pair(s, pp, 1.0);
        if (!(pr.r_classical > 0.0))
            throw ConfigError("scan: projector pair (" + pp.label1 + ", " + pp.label2 +
                              ") has zero classical rate; nothing to scan");
        ScanModel model;
        model.r_classical = sc.rate_scale * pr.r_classical;
        model.visibility = pr.vis;
        model.sign = pr.kind;
        model.d1 = g.d1;
        model.d2 = g.d2;
        model.slope = sc.slope;
        model.delay_start = sc.delay_start;
        model.delay_stop = sc.delay_stop;
        model.points = sc.points;

        SynthOptions so;
        so.noise = sc.noise;
        so.drift_fraction = sc.drift_fraction;
        so.singles_dip_fraction = sc.singles_dip_fraction;
        const ScanRecord rec = synthesize(model, sc.singles1, sc.singles2, sc.dwell,
                                          mix_seed(seed, k), so, sc.window);

        char name[128];
        std::snprintf(name, sizeof(name), "scan_%02d_%s_%s", k,
                      sanitize_label(pp.label1).c_str(), sanitize_label(pp.label2).c_str());
        const std::string csv_name = std::string(name) + ".csv";
        const std::string corrected_name = std::string(name) + "_corrected.csv";
        write_scan_csv(rec, (dir / csv_name).string());
        write_corrected_csv(rec, (dir / corrected_name).string());

        const FitResult fr = fit_scan(rec);
        const json fj = fit_to_json(fr);
        const std::string fit_name = std::string(name) + "_fit.json";
        write_json_file(fj, dir / fit_name);

        entries.push_back(json{{"projector", json::array({pp.label1, pp.label2})},
                               {"model_visibility", model.visibility},
                               {"model_sign", to_string(model.sign)},
                               {"model_r_classical", model.r_classical},
                               {"scan_csv", csv_name},
                               {"fit", fj}});
        artifacts.push_back(csv_name);
        artifacts.push_back(corrected_name);
        artifacts.push_back(fit_name);
        ++k;
    }
    json summary{{"command", "scan"},
                 {"seed", seed},
                 {"noise", sc.noise},
                 {"scans", entries},
                 {"artifacts", artifacts}};
    write_json_file(summary, dir / "scan_summary.json");
    return summary;
}

json cmd_design(const json& cfg) {
    const BasisConfig bc = parse_basis(cfg);
    if (!cfg.contains("unitary")) throw ConfigError("config: missing 'unitary'");
    const Eigen::MatrixXcd U = resolve_unitary(cfg.at("unitary"));
    if (U.rows() != static_cast<Eigen::Index>(bc.l.size()))
        throw ConfigError("design: unitary dimension does not match basis size");

    WfmConfig wc;
    json j = cfg.value("wfm", json::object());
    check_keys(j,
               {"planes", "spacing", "sweeps", "wavelengths", "stop_efficiency",
                "dump_fields"},
               "wfm");
    wc.planes = j.value("planes", 3);
    wc.spacing = j.value("spacing", 0.8);
    wc.sweeps = j.value("sweeps", 100);
    if (j.contains("wavelengths"))
        wc.wavelengths = j.at("wavelengths").get<std::vector<double>>();
    wc.stop_efficiency = j.value("stop_efficiency", 0.0);

    const Basis basis = realize_basis(bc);
    auto [design, report] = wavefront_match(basis, U, wc);

    const fs::path dir = out_dir(cfg);
    save_design(design, (dir / "design").string());

    const TransferMetrics tm = transfer_matrix(design, design.wavelength);
    json rep{{"sweeps_run", report.sweeps_run},
             {"final_efficiency", report.final_efficiency},
             {"sweep_efficiency", report.sweep_efficiency},
             {"wavelength_efficiency", json::array()},
             {"transfer_at_center", metrics_to_json(tm)}};
    for (const auto& [wl, eff] : report.wavelength_efficiency)
        rep["wavelength_efficiency"].push_back(json::array({wl, eff}));
    write_json_file(rep, dir / "wfm_report.json");

    if (j.value("dump_fields", false)) {
        const fs::path fdir = dir / "fields";
        fs::create_directories(fdir);
        for (int i = 0; i < basis.dim(); ++i) {
            const std::string stem = "in_" + std::to_string(i);
            write_field_csv(basis.fields[i], (fdir / (stem + ".csv")).string());
            write_field_pgm_intensity(basis.fields[i], (fdir / (stem + "_intensity.pgm")).string());
            write_field_pgm_phase(basis.fields[i], (fdir / (stem + "_phase.pgm")).string());
            const Field out = apply_mplc(design, basis.fields[i]);
            const std::string ostem = "out_" + std::to_string(i);
            write_field_csv(out, (fdir / (ostem + ".csv")).string());
            write_field_pgm_intensity(out, (fdir / (ostem + "_intensity.pgm")).string());
            write_field_pgm_phase(out, (fdir / (ostem + "_phase.pgm")).string());
        }
    }

    json summary{{"command", "design"},
                 {"design_dir", "design"},
                 {"report", rep},
                 {"artifacts", json::array({"design", "wfm_report.json"})}};
    return summary;
}

json cmd_fit(const json& cfg) {
    if (!cfg.contains("fit")) throw ConfigError("config: missing 'fit' section");
    const json& j = cfg.at("fit");
    check_keys(j, {"csv", "sign", "drift_correction", "d1_init", "d2_init"}, "fit");
    if (!j.contains("csv")) throw ConfigError("fit: missing 'csv' path");
    const ScanRecord rec = read_scan_csv(j.at("csv").get<std::string>());
    FitOptions opt;
    const std::string sign = j.value("sign", "auto");
    if (sign == "dip") opt.sign = FitSign::dip;
    else if (sign == "bump") opt.sign = FitSign::bump;
    else if (sign == "auto") opt.sign = FitSign::automatic;
    else throw ConfigError("fit: sign must be auto|dip|bump");
    opt.drift_correction = j.value("drift_correction", true);
    opt.d1_init = j.value("d1_init", 0.0);
    opt.d2_init = j.value("d2_init", 0.0);

    const FitResult fr = fit_scan(rec, opt);
    const json fj = fit_to_json(fr);
    const fs::path dir = out_dir(cfg);
    write_json_file(fj, dir / "fit.json");
    json summary{{"command", "fit"},
                 {"fit", fj},
                 {"artifacts", json::array({"fit.json"})}};
    return summary;
}

json cmd_witness(const json& cfg) {
    if (!cfg.contains("witness")) throw ConfigError("config: missing 'witness' section");
    const json& j = cfg.at("witness");
    check_keys(j, {"visibilities", "errors", "counts", "k_sigma"}, "witness");
    const double k_sigma = j.value("k_sigma", 3.0);
    WitnessResult w;
    if (j.contains("counts")) {
        const auto rows = j.at("counts").get<std::vector<std::vector<double>>>();
        if (rows.size() != 3)
            throw ConfigError("witness: 'counts' needs 3 bases of 4 permutation counts");
        std::array<std::array<double, 4>, 3> counts{};
        for (int b = 0; b < 3; ++b) {
            if (rows[b].size() != 4)
                throw ConfigError("witness: each basis needs 4 counts (N11, N12, N21, N22)");
            for (int i = 0; i < 4; ++i) counts[b][i] = rows[b][i];
        }
        w = witness_from_counts(counts, k_sigma);
    } else {
        if (!j.contains("visibilities"))
            throw ConfigError("witness: need 'visibilities' or 'counts'");
        const auto vis = j.at("visibilities").get<std::vector<double>>();
        std::vector<double> errs = j.value("errors", std::vector<double>{0.0, 0.0, 0.0});
        if (vis.size() != 3 || errs.size() != 3)
            throw ConfigError("witness: exactly three visibilities (and errors) required");
        w = witness({vis[0], vis[1], vis[2]}, {errs[0], errs[1], errs[2]}, k_sigma);
    }
    const json wj = witness_to_json(w);
    const fs::path dir = out_dir(cfg);
    write_json_file(wj, dir / "witness.json");
    json summary{{"command", "witness"},
                 {"witness", wj},
                 {"artifacts", json::array({"witness.json"})}};
    return summary;
}

json cmd_transfer(const json& cfg) {
    if (!cfg.contains("transfer")) throw ConfigError("config: missing 'transfer' section");
    const json& j = cfg.at("transfer");
    check_keys(j, {"design", "wavelengths"}, "transfer");
    if (!j.contains("design")) throw ConfigError("transfer: missing 'design' directory");
    const MplcDesign design = load_design(j.at("design").get<std::string>());
    std::vector<double> wls;
    if (j.contains("wavelengths")) wls = j.at("wavelengths").get<std::vector<double>>();
    if (wls.empty()) wls.push_back(design.wavelength);

    json rows = json::array();
    for (const TransferMetrics& m : bandwidth_scan(design, wls))
        rows.push_back(metrics_to_json(m));
    const fs::path dir = out_dir(cfg);
    write_json_file(rows, dir / "transfer.json");
    json summary{{"command", "transfer"},
                 {"metrics", rows},
                 {"artifacts", json::array({"transfer.json"})}};
    return summary;
}

}  // namespace

std::vector<int> default_basis_l(int dim) {
    switch (dim) {
        case 2: return {-1, 1};
        case 3: return {-1, 0, 1};
        case 4: return {-2, -1, 1, 2};
        default: {
            // symmetric list skipping 0 for even dimensions
            std::vector<int> l;
            for (int i = 0; i < dim; ++i) l.push_back(i - dim / 2);
            return l;
        }
    }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t k) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (k + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Eigen::MatrixXcd resolve_unitary(const json& spec) {
    Eigen::MatrixXcd U;
    if (spec.is_string()) {
        U = named_unitary(spec.get<std::string>());
    } else if (spec.is_object() && spec.contains("matrix")) {
        U = matrix_from_json(spec.at("matrix"));
    } else if (spec.is_object() && spec.contains("file")) {
        const json j = load_json_file(spec.at("file").get<std::string>());
        U = matrix_from_json(j.is_object() && j.contains("matrix") ? j.at("matrix") : j);
    } else {
        throw ConfigError(
            "unitary: expected a name, {\"matrix\": ...} or {\"file\": ...}, got " +
            spec.dump());
    }
    require_unitary(U, "unitary");
    return U;
}

Eigen::VectorXcd resolve_state(const json& token, int dim,
                               const std::vector<int>& basis_l) {
    if (static_cast<int>(basis_l.size()) != dim)
        throw ConfigError("resolve_state: basis size does not match dimension");
    if (token.is_array()) {
        if (static_cast<int>(token.size()) != dim)
            throw ConfigError("state: coefficient list must have dimension " +
                              std::to_string(dim));
        Eigen::VectorXcd v(dim);
        for (int i = 0; i < dim; ++i) v(i) = cplx_from_json(token.at(i));
        if (std::abs(v.squaredNorm() - 1.0) > 1e-9)
            throw ConfigError("state: coefficients must be unit norm");
        v /= v.norm();
        return v;
    }
    if (!token.is_string()) throw ConfigError("state: expected a name or coefficient list");
    const std::string name = token.get<std::string>();
    if (name.size() > 1 && (name[0] == 'l') &&
        (std::isdigit(static_cast<unsigned char>(name[1])) || name[1] == '-' || name[1] == '+')) {
        int l = 0;
        try {
            l = std::stoi(name.substr(1));
        } catch (const std::exception&) {
            throw ConfigError("state: bad mode token '" + name + "'");
        }
        const auto it = std::find(basis_l.begin(), basis_l.end(), l);
        if (it == basis_l.end())
            throw ConfigError("state: mode l=" + std::to_string(l) + " is not in the basis");
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
        v(static_cast<int>(it - basis_l.begin())) = 1.0;
        return v;
    }
    if (name.size() > 1 && name[0] == 'm' &&
        std::isdigit(static_cast<unsigned char>(name[1]))) {
        const int i = std::stoi(name.substr(1));
        if (i < 0 || i >= dim)
            throw ConfigError("state: mode index out of range in '" + name + "'");
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
        v(i) = 1.0;
        return v;
    }
    return named_state(name, dim);
}

std::string state_label(const json& token) {
    if (token.is_string()) return token.get<std::string>();
    return "custom";
}

json fit_to_json(const FitResult& fr) {
    return json{{"r_classical", fr.r_classical},
                {"err_r_classical", fr.err_r_classical},
                {"visibility", fr.visibility},
                {"err_visibility", fr.err_visibility},
                {"d1", fr.d1},
                {"err_d1", fr.err_d1},
                {"d2", fr.d2},
                {"err_d2", fr.err_d2},
                {"slope", fr.slope},
                {"err_slope", fr.err_slope},
                {"delay_offset", fr.delay_offset},
                {"err_delay_offset", fr.err_delay_offset},
                {"sign", to_string(fr.sign)},
                {"residual_norm", fr.residual_norm},
                {"reduced_chi2", fr.reduced_chi2},
                {"iterations", fr.iterations},
                {"converged", fr.converged},
                {"visibility_clamped", fr.visibility_clamped},
                {"kernel_degenerate", fr.kernel_degenerate},
                {"negative_corrected_rates", fr.negative_corrected_rates}};
}

json witness_to_json(const WitnessResult& w) {
    return json{{"visibilities", w.visibilities},
                {"errors", w.errors},
                {"w", w.w},
                {"w_error", w.w_error},
                {"k_sigma", w.k_sigma},
                {"entangled", w.entangled}};
}

json metrics_to_json(const TransferMetrics& m) {
    return json{{"wavelength", m.wavelength},
                {"transfer", to_json(m.transfer)},
                {"mode_efficiency", m.mode_efficiency},
                {"target_efficiency", m.target_efficiency},
                {"mean_mode_efficiency", m.mean_mode_efficiency},
                {"mean_target_efficiency", m.mean_target_efficiency},
                {"mode_independent_loss", m.mode_independent_loss},
                {"in_space_error", m.in_space_error},
                {"max_singular_value", m.max_singular_value}};
}

json run_command(const std::string& command, const json& config) {
    check_keys(config,
               {"seed", "out", "basis", "unitary", "inputs", "projectors", "gamma", "scan",
                "wfm", "witness", "fit", "transfer"},
               "config");
    if (command == "design") return cmd_design(config);
    if (command == "predict") return cmd_predict(config);
    if (command == "scan") return cmd_scan(config);
    if (command == "fit") return cmd_fit(config);
    if (command == "witness") return cmd_witness(config);
    if (command == "transfer") return cmd_transfer(config);
    throw ConfigError("unknown command '" + command +
                      "' (expected design|predict|scan|fit|witness|transfer)");
}

}  // namespace homsim
