#pragma once

#include <string>

#include "cylstab/common.hpp"

/// Run every machine-checkable invariant of the library over the built-in
/// corpus (plus any curve files in corpus_dir), printing one PASS/FAIL line
/// per check. Returns true when everything passed. fast skips the
/// 2D-oracle-based checks.
bool run_verify_suite(const cylstab::SolverConfig& config, const std::string& corpus_dir,
                      const std::string& dump_spectrum_path, bool fast);
