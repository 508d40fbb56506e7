#include "homsim.h"

#include <cstring>
#include <string>

#include "homsim/biphoton.hpp"
#include "homsim/experiment.hpp"
#include "homsim/freespace.hpp"
#include "homsim/jsonio.hpp"
#include "homsim/modefield.hpp"
#include "homsim/scanlab.hpp"

using homsim::json;

struct hs_context {
    std::string error;
};

struct hs_unitary {
    Eigen::MatrixXcd m;
};

struct hs_field {
    homsim::Field f;
};

struct hs_design {
    homsim::MplcDesign d;
};

namespace {

int fail(hs_context* ctx, int code, const std::string& msg) {
    if (ctx) ctx->error = msg;
    return code;
}

// Runs fn, translating exceptions to status codes.
template <typename Fn>
int guarded(hs_context* ctx, Fn&& fn) {
    if (!ctx) return HS_ERR_CONFIG;
    try {
        fn();
        ctx->error.clear();
        return HS_OK;
    } catch (const homsim::ConfigError& e) {
        return fail(ctx, HS_ERR_CONFIG, e.what());
    } catch (const homsim::NumericError& e) {
        return fail(ctx, HS_ERR_NUMERIC, e.what());
    } catch (const std::exception& e) {
        return fail(ctx, HS_ERR_NUMERIC, e.what());
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

Eigen::VectorXcd vector_from_interleaved(const double* data, int dim, const char* what) {
    if (!data) throw homsim::ConfigError(std::string(what) + ": null pointer");
    Eigen::VectorXcd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = homsim::cplx(data[2 * i], data[2 * i + 1]);
    return v;
}

json parse_json_arg(const char* text, const char* what) {
    if (!text || !*text) return json::object();
    try {
        return json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw homsim::ConfigError(std::string(what) + ": malformed JSON: " + e.what());
    }
}

homsim::FitOptions fit_options_from_json(const json& j) {
    homsim::FitOptions opt;
    const std::string sign = j.value("sign", "auto");
    if (sign == "dip") opt.sign = homsim::FitSign::dip;
    else if (sign == "bump") opt.sign = homsim::FitSign::bump;
    else if (sign == "auto") opt.sign = homsim::FitSign::automatic;
    else throw homsim::ConfigError("fit options: sign must be auto|dip|bump");
    opt.drift_correction = j.value("drift_correction", true);
    opt.d1_init = j.value("d1_init", 0.0);
    opt.d2_init = j.value("d2_init", 0.0);
    opt.max_iterations = j.value("max_iterations", 200);
    return opt;
}

}  // namespace

extern "C" {

const char* hs_version(void) { return "1.0.0"; }

void hs_string_free(char* s) { delete[] s; }

hs_context* hs_context_create(void) { return new hs_context(); }

void hs_context_destroy(hs_context* ctx) { delete ctx; }

const char* hs_last_error(const hs_context* ctx) {
    return ctx ? ctx->error.c_str() : "";
}

int hs_unitary_create_named(hs_context* ctx, const char* name, hs_unitary** out) {
    return guarded(ctx, [&] {
        if (!name || !out) throw homsim::ConfigError("null argument");
        *out = new hs_unitary{homsim::named_unitary(name)};
    });
}

int hs_unitary_from_json(hs_context* ctx, const char* text, hs_unitary** out) {
    return guarded(ctx, [&] {
        if (!text || !out) throw homsim::ConfigError("null argument");
        Eigen::MatrixXcd m = homsim::matrix_from_json(parse_json_arg(text, "unitary"));
        homsim::require_unitary(m, "unitary");
        *out = new hs_unitary{std::move(m)};
    });
}

int hs_unitary_dim(const hs_unitary* u) {
    return u ? static_cast<int>(u->m.rows()) : 0;
}

int hs_unitary_entry(hs_context* ctx, const hs_unitary* u, int row, int col,
                     double* re, double* im) {
    return guarded(ctx, [&] {
        if (!u || !re || !im) throw homsim::ConfigError("null argument");
        if (row < 0 || row >= u->m.rows() || col < 0 || col >= u->m.cols())
            throw homsim::ConfigError("matrix index out of range");
        *re = u->m(row, col).real();
        *im = u->m(row, col).imag();
    });
}

int hs_unitary_to_json(hs_context* ctx, const hs_unitary* u, char** json_out) {
    return guarded(ctx, [&] {
        if (!u || !json_out) throw homsim::ConfigError("null argument");
        *json_out = dup_string(homsim::to_json(u->m).dump());
    });
}

void hs_unitary_destroy(hs_unitary* u) { delete u; }

int hs_coincidence_rate(hs_context* ctx, const hs_unitary* u, const double* in1,
                        const double* in2, const double* proj1, const double* proj2,
                        double gamma, double* rate_out) {
    return guarded(ctx, [&] {
        if (!u || !rate_out) throw homsim::ConfigError("null argument");
        const int dim = static_cast<int>(u->m.rows());
        homsim::PairSetup s{u->m, vector_from_interleaved(in1, dim, "in1"),
                            vector_from_interleaved(in2, dim, "in2"),
                            vector_from_interleaved(proj1, dim, "proj1"),
                            vector_from_interleaved(proj2, dim, "proj2"), gamma};
        *rate_out = homsim::coincidence_rate(s);
    });
}

int hs_field_lg(hs_context* ctx, int nx, int ny, double dx, double dy,
                double wavelength, int l, int p, double waist, double z,
                hs_field** out) {
    return guarded(ctx, [&] {
        if (!out) throw homsim::ConfigError("null argument");
        homsim::Grid grid{nx, ny, dx, dy};
        *out = new hs_field{homsim::lg_field(grid, wavelength, l, p, waist, z)};
    });
}

int hs_field_superpose(hs_context* ctx, const hs_field* const* fields, size_t count,
                       const double* coeffs, hs_field** out) {
    return guarded(ctx, [&] {
        if (!fields || !coeffs || !out || count == 0)
            throw homsim::ConfigError("null argument");
        std::vector<std::pair<const homsim::Field*, homsim::cplx>> terms;
        for (size_t i = 0; i < count; ++i) {
            if (!fields[i]) throw homsim::ConfigError("null field in superposition");
            terms.emplace_back(&fields[i]->f,
                               homsim::cplx(coeffs[2 * i], coeffs[2 * i + 1]));
        }
        *out = new hs_field{homsim::superpose(terms)};
    });
}

int hs_field_propagate(hs_context* ctx, const hs_field* f, double distance,
                       hs_field** out) {
    return guarded(ctx, [&] {
        if (!f || !out) throw homsim::ConfigError("null argument");
        *out = new hs_field{homsim::propagate(f->f, distance)};
    });
}

int hs_field_inner_product(hs_context* ctx, const hs_field* a, const hs_field* b,
                           double* re, double* im) {
    return guarded(ctx, [&] {
        if (!a || !b || !re || !im) throw homsim::ConfigError("null argument");
        const homsim::cplx v = homsim::inner_product(a->f, b->f);
        *re = v.real();
        *im = v.imag();
    });
}

int hs_field_power(hs_context* ctx, const hs_field* f, double* power_out) {
    return guarded(ctx, [&] {
        if (!f || !power_out) throw homsim::ConfigError("null argument");
        *power_out = homsim::power(f->f);
    });
}

int hs_field_write_csv(hs_context* ctx, const hs_field* f, const char* path) {
    return guarded(ctx, [&] {
        if (!f || !path) throw homsim::ConfigError("null argument");
        homsim::write_field_csv(f->f, path);
    });
}

int hs_field_write_pgm_intensity(hs_context* ctx, const hs_field* f, const char* path) {
    return guarded(ctx, [&] {
        if (!f || !path) throw homsim::ConfigError("null argument");
        homsim::write_field_pgm_intensity(f->f, path);
    });
}

int hs_field_write_pgm_phase(hs_context* ctx, const hs_field* f, const char* path) {
    return guarded(ctx, [&] {
        if (!f || !path) throw homsim::ConfigError("null argument");
        homsim::write_field_pgm_phase(f->f, path);
    });
}

void hs_field_destroy(hs_field* f) { delete f; }

int hs_design_load(hs_context* ctx, const char* dir, hs_design** out) {
    return guarded(ctx, [&] {
        if (!dir || !out) throw homsim::ConfigError("null argument");
        *out = new hs_design{homsim::load_design(dir)};
    });
}

int hs_design_save(hs_context* ctx, const hs_design* d, const char* dir) {
    return guarded(ctx, [&] {
        if (!d || !dir) throw homsim::ConfigError("null argument");
        homsim::save_design(d->d, dir);
    });
}

int hs_design_transfer(hs_context* ctx, const hs_design* d, double wavelength,
                       char** json_out) {
    return guarded(ctx, [&] {
        if (!d || !json_out) throw homsim::ConfigError("null argument");
        const homsim::TransferMetrics m = homsim::transfer_matrix(d->d, wavelength);
        *json_out = dup_string(homsim::metrics_to_json(m).dump());
    });
}

void hs_design_destroy(hs_design* d) { delete d; }

int hs_fit_scan_csv(hs_context* ctx, const char* csv_path, const char* options_json,
                    char** json_out) {
    return guarded(ctx, [&] {
        if (!csv_path || !json_out) throw homsim::ConfigError("null argument");
        const homsim::ScanRecord rec = homsim::read_scan_csv(csv_path);
        const homsim::FitOptions opt =
            fit_options_from_json(parse_json_arg(options_json, "fit options"));
        *json_out = dup_string(homsim::fit_to_json(homsim::fit_scan(rec, opt)).dump());
    });
}

int hs_fit_scan_arrays(hs_context* ctx, const double* delays, const double* coincidences,
                       const double* singles1, const double* singles2, size_t n,
                       double dwell, double window, const char* options_json,
                       char** json_out) {
    return guarded(ctx, [&] {
        if (!delays || !coincidences || !json_out)
            throw homsim::ConfigError("null argument");
        homsim::ScanRecord rec;
        rec.delays.assign(delays, delays + n);
        rec.coincidences.assign(coincidences, coincidences + n);
        if (singles1) rec.singles1.assign(singles1, singles1 + n);
        else rec.singles1.assign(n, 0.0);
        if (singles2) rec.singles2.assign(singles2, singles2 + n);
        else rec.singles2.assign(n, 0.0);
        rec.dwell = dwell;
        rec.window = window;
        homsim::FitOptions opt =
            fit_options_from_json(parse_json_arg(options_json, "fit options"));
        if (!singles1 || !singles2) opt.drift_correction = false;
        *json_out = dup_string(homsim::fit_to_json(homsim::fit_scan(rec, opt)).dump());
    });
}

int hs_witness_from_visibilities(hs_context* ctx, const double* vis3,
                                 const double* err3, double k_sigma, char** json_out) {
    return guarded(ctx, [&] {
        if (!vis3 || !json_out) throw homsim::ConfigError("null argument");
        const std::array<double, 3> vis{vis3[0], vis3[1], vis3[2]};
        const std::array<double, 3> err =
            err3 ? std::array<double, 3>{err3[0], err3[1], err3[2]}
                 : std::array<double, 3>{0.0, 0.0, 0.0};
        const homsim::WitnessResult w = homsim::witness(vis, err, k_sigma);
        *json_out = dup_string(homsim::witness_to_json(w).dump());
    });
}

int hs_witness_from_counts(hs_context* ctx, const double* counts12, double k_sigma,
                           char** json_out) {
    return guarded(ctx, [&] {
        if (!counts12 || !json_out) throw homsim::ConfigError("null argument");
        std::array<std::array<double, 4>, 3> counts{};
        for (int b = 0; b < 3; ++b)
            for (int i = 0; i < 4; ++i) counts[b][i] = counts12[4 * b + i];
        const homsim::WitnessResult w = homsim::witness_from_counts(counts, k_sigma);
        *json_out = dup_string(homsim::witness_to_json(w).dump());
    });
}

int hs_run(hs_context* ctx, const char* command, const char* config_json,
           const char* overrides_json, char** summary_out) {
    return guarded(ctx, [&] {
        if (!command || !config_json || !summary_out)
            throw homsim::ConfigError("null argument");
        json config = parse_json_arg(config_json, "config");
        const json overrides = parse_json_arg(overrides_json, "overrides");
        for (auto it = overrides.begin(); it != overrides.end(); ++it)
            config[it.key()] = it.value();
        *summary_out = dup_string(homsim::run_command(command, config).dump());
    });
}

}  // extern "C"
