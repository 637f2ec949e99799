#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dres/utility.hpp"

namespace dres {

class scenario_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SweepRange {
    double min = 0.0;
    double max = 1.0;
    int points = 2;
};

/// Fully resolved experiment configuration.
struct Scenario {
    double lambda = 1.5;
    double alpha = 0.8;
    std::vector<double> r = {1.0, 1.5, 2.0, 2.5, 3.0};
    std::string m_policy = "half_r"; ///< "zero" or "half_r"
    double cost_a = 0.05;
    double cost_b = 0.5;
    double cost_c = 0.0;
    std::string study = "all"; ///< allocation | pricing | ee | all
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    int trials = 500;                      ///< pricing-sweep realizations
    SweepRange chi_range{0.02, 15.0, 750}; ///< allocation study
    SweepRange delta_range{1.0, 2.5, 7};   ///< pricing demand-level sweep
    SweepRange scale_range{0.6, 1.6, 11};  ///< ee study demand scaling
    std::optional<std::string> slot_table_path;

    Population population() const;
};

/// 24 hourly rows of per-consumer reference points.
struct SlotTable {
    std::vector<std::string> labels;     ///< 24 slot labels
    std::vector<std::vector<double>> r;  ///< 24 x K, all > 0
    std::size_t consumers() const { return r.empty() ? 0 : r.front().size(); }
};

/// Parses and validates a scenario JSON file; missing fields take the
/// defaults above. Errors name the offending field.
Scenario load_scenario(const std::string& path);

/// Parses a `slot,consumer_1,...,consumer_K` CSV with exactly 24 data rows.
/// Errors name the offending row and column.
SlotTable ingest_reference_csv(const std::string& path);

/// Synthetic day profile with a configurable evening peak; stands in for
/// household data that cannot be redistributed.
SlotTable generate_slot_table(std::size_t consumers, int peak_hour,
                              std::uint64_t seed);

void write_slot_table(const SlotTable& table, const std::string& path);

/// One emitted CSV: a header plus numeric rows, written with 12
/// significant digits in a stable column order.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// chi sweep of the optimal allocator against the PPA and UPA baselines;
/// columns: chi, improvement_vs_ppa, improvement_vs_upa (fractions of the
/// optimal sum-utility).
Table run_allocation_study(const Scenario& scn);

struct PricingStudyResult {
    Table per_slot;     ///< welfare and aggregate load under both tariffs
    Table demand_sweep; ///< mean relative welfare improvement (%) vs demand
};

PricingStudyResult run_pricing_study(const Scenario& scn,
                                     const SlotTable& slots);

/// Sum-efficiency of SEE, SEE-C, per-consumer IEE and UPA baselines as the
/// demand level scales.
Table run_ee_study(const Scenario& scn);

/// Writes one CSV per table plus a JSON-lines manifest with the resolved
/// scenario and seed. Creates out_dir if missing.
void emit_outputs(const std::vector<Table>& tables, const Scenario& scn);

} // namespace dres
