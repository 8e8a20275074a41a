#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace gibbsprep {

// One verification criterion's outcome. `margins` holds the quantities the
// check compared (worst observed value vs allowed bound, counts, etc.) so a
// failure is diagnosable from the report alone.
struct CriterionReport {
    int id = 0;
    std::string name;
    bool pass = false;
    long cases = 0;
    long failures = 0;
    std::vector<std::pair<std::string, double>> margins;
    double elapsed_seconds = 0.0;

    nlohmann::json to_json() const;
    std::string summary_line() const;
};

// The numbered acceptance checks. Each pins its instance sizes, sample
// counts, and tolerances internally.
CriterionReport verify_pauli_algebra();          // 1
CriterionReport verify_sampler_unbiasedness();   // 2
CriterionReport verify_coefficient_bounds();     // 3
CriterionReport verify_separability_mean();      // 4
CriterionReport verify_potential_invariant();    // 5
CriterionReport verify_stabilizer_emission();    // 6
CriterionReport verify_cluster_accuracy();       // 7
CriterionReport verify_structural_lemmas();      // 8
CriterionReport verify_end_to_end_sampling();    // 9
CriterionReport verify_tree_stationarity();      // 10
CriterionReport verify_polymer_counts();         // 11

CriterionReport run_criterion(int id);

// CLI suite names -> criterion ids.
std::vector<int> criteria_for_suite(const std::string& suite);

} // namespace gibbsprep
