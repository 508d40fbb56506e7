#pragma once

#include <cstdint>
#include <string>

#include "homsim/biphoton.hpp"
#include "homsim/freespace.hpp"
#include "homsim/jsonio.hpp"
#include "homsim/scanlab.hpp"

namespace homsim {

// Config-driven front end shared by the shared-library API and the CLI.
// Commands: design, predict, scan, fit, witness, transfer. Each writes its
// artifacts under the config's "out" directory and returns a summary.
// Deterministic: identical config (including seed) produces byte-identical
// artifacts.
json run_command(const std::string& command, const json& config);

// Parsed pieces, exposed for reuse and tests ------------------------------

// "u2" | "u3" | "rot3" | "u4:<phi>" | {"matrix": ...} | {"file": path}
Eigen::MatrixXcd resolve_unitary(const json& spec);

// Mode tokens resolve against the basis OAM list (ascending), or the default
// list for the dimension (2: -1,+1; 3: -1,0,+1; 4: -2,-1,+1,+2):
//   "l<value>"  projector/input on one basis mode, e.g. "l-1", "l+1", "l0"
//   "m<index>"  basis mode by position
//   catalog names ("d", "a", "h", "v", "mub2_2", "mub2_3", "a1", "a2")
//   [[re,im], ...] raw coefficients (unit norm)
Eigen::VectorXcd resolve_state(const json& token, int dim,
                               const std::vector<int>& basis_l);
std::string state_label(const json& token);

std::vector<int> default_basis_l(int dim);

// stable per-scan seed derived from the master seed
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t k);

json fit_to_json(const FitResult& fr);
json witness_to_json(const WitnessResult& w);
json metrics_to_json(const TransferMetrics& m);

}  // namespace homsim
