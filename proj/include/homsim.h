// Public C API for the homsim shared library.
//
// All functions that can fail return an int status code:
//   HS_OK (0)          success
//   HS_ERR_CONFIG (2)  invalid configuration, input, or file contents
//   HS_ERR_NUMERIC (3) numeric failure (passivity violation, non-finite data)
// On failure the context stores a message retrievable with hs_last_error().
//
// Strings returned through char** are heap-allocated; release them with
// hs_string_free(). Handles are opaque and must be destroyed with their
// matching *_destroy function. A context must outlive the handles it created.

#pragma once

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define HS_OK 0
#define HS_ERR_CONFIG 2
#define HS_ERR_NUMERIC 3

typedef struct hs_context hs_context;
typedef struct hs_unitary hs_unitary;
typedef struct hs_field hs_field;
typedef struct hs_design hs_design;

const char* hs_version(void);
void hs_string_free(char* s);

hs_context* hs_context_create(void);
void hs_context_destroy(hs_context* ctx);
// Message of the most recent failure on this context; empty string if none.
// The pointer stays valid until the next failing call on the same context.
const char* hs_last_error(const hs_context* ctx);

// ---- unitaries ----

// name: "u2", "u3", "rot3", or "u4:<phi>" with phi in radians.
int hs_unitary_create_named(hs_context* ctx, const char* name, hs_unitary** out);
// json: matrix as rows of [re, im] pairs (plain numbers allowed for real entries).
int hs_unitary_from_json(hs_context* ctx, const char* json, hs_unitary** out);
int hs_unitary_dim(const hs_unitary* u);
// Writes the (row, col) entry; returns HS_ERR_CONFIG when out of range.
int hs_unitary_entry(hs_context* ctx, const hs_unitary* u, int row, int col,
                     double* re, double* im);
int hs_unitary_to_json(hs_context* ctx, const hs_unitary* u, char** json_out);
void hs_unitary_destroy(hs_unitary* u);

// Two-photon coincidence probability.
// in1, in2, proj1, proj2: interleaved re,im coefficient arrays of length 2*dim,
// each unit norm. gamma in [-1, 1] sets the pair indistinguishability.
int hs_coincidence_rate(hs_context* ctx, const hs_unitary* u, const double* in1,
                        const double* in2, const double* proj1, const double* proj2,
                        double gamma, double* rate_out);

// ---- scalar fields ----

int hs_field_lg(hs_context* ctx, int nx, int ny, double dx, double dy,
                double wavelength, int l, int p, double waist, double z,
                hs_field** out);
// coeffs: interleaved re,im pairs, one per field; must be unit norm.
int hs_field_superpose(hs_context* ctx, const hs_field* const* fields, size_t count,
                       const double* coeffs, hs_field** out);
int hs_field_propagate(hs_context* ctx, const hs_field* f, double distance,
                       hs_field** out);
int hs_field_inner_product(hs_context* ctx, const hs_field* a, const hs_field* b,
                           double* re, double* im);
int hs_field_power(hs_context* ctx, const hs_field* f, double* power_out);
int hs_field_write_csv(hs_context* ctx, const hs_field* f, const char* path);
int hs_field_write_pgm_intensity(hs_context* ctx, const hs_field* f, const char* path);
int hs_field_write_pgm_phase(hs_context* ctx, const hs_field* f, const char* path);
void hs_field_destroy(hs_field* f);

// ---- mode converter designs ----

int hs_design_load(hs_context* ctx, const char* dir, hs_design** out);
int hs_design_save(hs_context* ctx, const hs_design* d, const char* dir);
// Transfer metrics at one wavelength as a JSON object.
int hs_design_transfer(hs_context* ctx, const hs_design* d, double wavelength,
                       char** json_out);
void hs_design_destroy(hs_design* d);

// ---- scan fitting and the entanglement witness ----

int hs_fit_scan_csv(hs_context* ctx, const char* csv_path, const char* options_json,
                    char** json_out);
// delays in seconds, counts per dwell; singles may be NULL (disables drift
// correction and accidental subtraction uses zero singles).
int hs_fit_scan_arrays(hs_context* ctx, const double* delays, const double* coincidences,
                       const double* singles1, const double* singles2, size_t n,
                       double dwell, double window, const char* options_json,
                       char** json_out);
int hs_witness_from_visibilities(hs_context* ctx, const double* vis3,
                                 const double* err3, double k_sigma, char** json_out);
// counts12: three bases by four permutation counts (N11, N12, N21, N22), row major.
int hs_witness_from_counts(hs_context* ctx, const double* counts12, double k_sigma,
                           char** json_out);

// ---- batch commands ----

// command: design | predict | scan | fit | witness | transfer.
// config_json: full experiment configuration; overrides_json: optional object
// merged on top of the config (NULL or "" for none). Returns the command
// summary as JSON.
int hs_run(hs_context* ctx, const char* command, const char* config_json,
           const char* overrides_json, char** summary_out);

#ifdef __cplusplus
}
#endif
