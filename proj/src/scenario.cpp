#include "dres/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "dres/allocation.hpp"
#include "dres/energy_efficiency.hpp"
#include "dres/tariff.hpp"

namespace dres {

namespace {

using nlohmann::json;

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

double require_positive(const json& j, const std::string& field,
                        double fallback) {
    if (!j.contains(field)) return fallback;
    if (!j[field].is_number())
        throw scenario_error("field '" + field + "': expected a number");
    const double v = j[field].get<double>();
    if (!(v > 0.0))
        throw scenario_error("field '" + field + "': must be positive");
    return v;
}

SweepRange parse_range(const json& j, const std::string& field,
                       SweepRange fallback) {
    if (!j.contains(field)) return fallback;
    const auto& o = j[field];
    if (!o.is_object())
        throw scenario_error("field '" + field + "': expected an object");
    SweepRange r = fallback;
    if (o.contains("min")) r.min = o["min"].get<double>();
    if (o.contains("max")) r.max = o["max"].get<double>();
    if (o.contains("points")) r.points = o["points"].get<int>();
    if (!(r.max > r.min))
        throw scenario_error("field '" + field + "': max must exceed min");
    if (r.points < 2)
        throw scenario_error("field '" + field + "': needs >= 2 points");
    return r;
}

struct SlotOutcome {
    double welfare_ibr = 0.0;
    double welfare_flat = 0.0;
    double load_ibr = 0.0;
    double load_flat = 0.0;
    double q = 0.0;
    double p = 0.0;
};

// Designs the block tariff for one timeslot, simulates every consumer's
// best response under it and under the flat-p baseline, and reports the
// realized welfare and aggregate load of both.
SlotOutcome simulate_slot(const Population& pop, const CostModel& cost) {
    SlotOutcome out;
    try {
        const IbrTariff ibr = design_ibr(pop, cost);
        const IbrTariff flat = constant_rtp_tariff(ibr.p, pop);
        out.q = ibr.q;
        out.p = ibr.p;
        double u_ibr = 0.0, u_flat = 0.0;
        for (std::size_t pos = 0; pos < pop.size(); ++pos) {
            const std::size_t i = pop.input_index()[pos];
            const auto& prof = pop.sorted()[pos];
            const double xi = best_response(ibr, i, prof);
            const double xf = best_response(flat, i, prof);
            out.load_ibr += xi;
            out.load_flat += xf;
            u_ibr += eval_utility(xi, prof);
            u_flat += eval_utility(xf, prof);
        }
        out.welfare_ibr = u_ibr - cost.value(out.load_ibr);
        out.welfare_flat = u_flat - cost.value(out.load_flat);
    } catch (const degenerate_tariff_error&) {
        // No price separates the consumers at this demand level; both
        // policies collapse to the plain welfare optimum.
        const auto opt = find_chi_star(pop, cost);
        const double w = welfare(opt.chi_star, pop, cost);
        out.welfare_ibr = out.welfare_flat = w;
        out.load_ibr = out.load_flat = opt.chi_star;
    }
    return out;
}

} // namespace

Population Scenario::population() const {
    std::vector<double> m;
    if (m_policy == "half_r") {
        m.reserve(r.size());
        for (double ri : r) m.push_back(0.5 * ri);
    }
    return Population::homogeneous(r, lambda, alpha, m);
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw scenario_error("cannot open scenario file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw scenario_error("scenario '" + path + "': " + e.what());
    }
    if (!j.is_object())
        throw scenario_error("scenario '" + path + "': expected an object");

    Scenario s;
    if (j.contains("alpha")) {
        const double a = j["alpha"].get<double>();
        if (!(a > 0.0 && a < 1.0))
            throw scenario_error("field 'alpha': alpha outside (0,1)");
        s.alpha = a;
    }
    if (j.contains("lambda")) {
        const double l = j["lambda"].get<double>();
        if (!(l >= 1.0))
            throw scenario_error("field 'lambda': must be >= 1");
        s.lambda = l;
    }
    if (j.contains("r")) {
        if (!j["r"].is_array() || j["r"].empty())
            throw scenario_error("field 'r': expected a non-empty array");
        s.r.clear();
        for (std::size_t i = 0; i < j["r"].size(); ++i) {
            const auto& e = j["r"][i];
            if (!e.is_number() || !(e.get<double>() > 0.0))
                throw scenario_error("field 'r[" + std::to_string(i) +
                                     "]': must be a positive number");
            s.r.push_back(e.get<double>());
        }
    }
    if (j.contains("m_policy")) {
        s.m_policy = j["m_policy"].get<std::string>();
        if (s.m_policy != "zero" && s.m_policy != "half_r")
            throw scenario_error(
                "field 'm_policy': expected \"zero\" or \"half_r\"");
    }
    if (j.contains("cost")) {
        const auto& c = j["cost"];
        if (!c.is_object())
            throw scenario_error("field 'cost': expected an object");
        s.cost_a = require_positive(c, "a", s.cost_a);
        s.cost_b = require_positive(c, "b", s.cost_b);
        if (c.contains("c")) s.cost_c = c["c"].get<double>();
    }
    if (j.contains("study")) {
        s.study = j["study"].get<std::string>();
        if (s.study != "allocation" && s.study != "pricing" &&
            s.study != "ee" && s.study != "all")
            throw scenario_error("field 'study': expected allocation, "
                                 "pricing, ee, or all");
    }
    if (j.contains("out_dir")) s.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("trials")) {
        s.trials = j["trials"].get<int>();
        if (s.trials < 1)
            throw scenario_error("field 'trials': must be >= 1");
    }
    s.chi_range = parse_range(j, "chi_range", s.chi_range);
    s.delta_range = parse_range(j, "delta_range", s.delta_range);
    s.scale_range = parse_range(j, "scale_range", s.scale_range);
    if (j.contains("slot_table")) {
        s.slot_table_path = j["slot_table"].get<std::string>();
        if (!std::filesystem::exists(*s.slot_table_path))
            throw scenario_error("field 'slot_table': file not found: " +
                                 *s.slot_table_path);
    }
    // Surface parameter problems with the same wording as the profile
    // validator.
    auto rep = validate_profile({s.r.front(), s.lambda, s.alpha, {}, 0.0});
    if (!rep.ok()) throw scenario_error("scenario: " + rep.violations.front());
    return s;
}

SlotTable ingest_reference_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw scenario_error("cannot open slot table: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw scenario_error(path + ": empty file");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    if (header.size() < 2 || header.front() != "slot")
        throw scenario_error(path + ": header must be slot,consumer_1,...");
    const std::size_t K = header.size() - 1;

    SlotTable t;
    int row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++row;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != K + 1)
            throw scenario_error(path + ": row " + std::to_string(row) +
                                 ": expected " + std::to_string(K + 1) +
                                 " columns, got " +
                                 std::to_string(cells.size()));
        t.labels.push_back(cells.front());
        std::vector<double> vals(K);
        for (std::size_t c = 0; c < K; ++c) {
            try {
                std::size_t used = 0;
                vals[c] = std::stod(cells[c + 1], &used);
                if (used != cells[c + 1].size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw scenario_error(path + ": row " + std::to_string(row) +
                                     ", column " + header[c + 1] +
                                     ": not a number: '" + cells[c + 1] + "'");
            }
            if (!(vals[c] > 0.0))
                throw scenario_error(path + ": row " + std::to_string(row) +
                                     ", column " + header[c + 1] +
                                     ": reference point must be positive");
        }
        t.r.push_back(std::move(vals));
    }
    if (t.r.size() != 24)
        throw scenario_error(path + ": expected 24 slots, got " +
                             std::to_string(t.r.size()));
    return t;
}

SlotTable generate_slot_table(std::size_t consumers, int peak_hour,
                              std::uint64_t seed) {
    if (consumers == 0)
        throw scenario_error("generate_slot_table: needs >= 1 consumer");
    if (peak_hour < 0 || peak_hour > 23)
        throw scenario_error("generate_slot_table: peak hour outside 0..23");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(0.97, 1.03);

    std::vector<double> base(consumers);
    for (std::size_t i = 0; i < consumers; ++i)
        base[i] = 0.8 + 0.4 * static_cast<double>(i);

    SlotTable t;
    for (int h = 0; h < 24; ++h) {
        double prof = 0.55 +
                      0.25 * std::exp(-std::pow(h - 8.0, 2.0) / 18.0) +
                      0.9 * std::exp(-std::pow(h - peak_hour, 2.0) / 8.0);
        if (h < 5) prof = 0.45; // overnight floor
        std::vector<double> row(consumers);
        for (std::size_t i = 0; i < consumers; ++i)
            row[i] = base[i] * prof * jitter(rng);
        t.r.push_back(std::move(row));
        char label[8];
        std::snprintf(label, sizeof(label), "%02d:00", h);
        t.labels.emplace_back(label);
    }
    return t;
}

void write_slot_table(const SlotTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw scenario_error("cannot write slot table: " + path);
    out << "slot";
    for (std::size_t i = 0; i < table.consumers(); ++i)
        out << ",consumer_" << i + 1;
    out << "\n";
    for (std::size_t s = 0; s < table.r.size(); ++s) {
        out << table.labels[s];
        for (double v : table.r[s]) out << "," << fmt12(v);
        out << "\n";
    }
}

Table run_allocation_study(const Scenario& scn) {
    const Population pop =
        Population::homogeneous(scn.r, scn.lambda, scn.alpha);
    Table t;
    t.name = "allocation_study";
    t.columns = {"chi", "improvement_vs_ppa", "improvement_vs_upa"};
    const auto& rr = scn.chi_range;
    for (int i = 0; i < rr.points; ++i) {
        const double chi =
            rr.min + (rr.max - rr.min) * static_cast<double>(i) /
                         (rr.points - 1);
        const double u_opt = solve_opg(chi, pop).objective;
        const double u_ppa = allocate_ppa(chi, pop).objective;
        const double u_upa = allocate_upa(chi, pop).objective;
        const double ip = u_opt > 0.0 ? (u_opt - u_ppa) / u_opt : 0.0;
        const double iu = u_opt > 0.0 ? (u_opt - u_upa) / u_opt : 0.0;
        t.rows.push_back({chi, ip, iu});
    }
    return t;
}

PricingStudyResult run_pricing_study(const Scenario& scn,
                                     const SlotTable& slots) {
    const CostModel cost =
        CostModel::quadratic(scn.cost_a, scn.cost_b, scn.cost_c);

    PricingStudyResult out;
    out.per_slot.name = "pricing_per_slot";
    out.per_slot.columns = {"slot",       "demand",     "welfare_ibr",
                            "welfare_flat", "load_ibr", "load_flat",
                            "q",          "p"};
    for (std::size_t s = 0; s < slots.r.size(); ++s) {
        const Population pop =
            Population::homogeneous(slots.r[s], scn.lambda, scn.alpha);
        const SlotOutcome o = simulate_slot(pop, cost);
        double demand = 0.0;
        for (double v : slots.r[s]) demand += v;
        out.per_slot.rows.push_back({static_cast<double>(s), demand,
                                     o.welfare_ibr, o.welfare_flat,
                                     o.load_ibr, o.load_flat, o.q, o.p});
    }

    out.demand_sweep.name = "pricing_demand_sweep";
    out.demand_sweep.columns = {"delta", "mean_welfare_ibr",
                                "mean_welfare_flat", "improvement_pct"};
    std::mt19937_64 rng(scn.seed);
    std::uniform_real_distribution<double> uni(-0.5, 0.5);
    const auto& dr = scn.delta_range;
    for (int d = 0; d < dr.points; ++d) {
        const double delta =
            dr.min + (dr.max - dr.min) * static_cast<double>(d) /
                         (dr.points - 1);
        double sum_ibr = 0.0, sum_flat = 0.0;
        for (int trial = 0; trial < scn.trials; ++trial) {
            std::vector<double> r(5);
            for (double& v : r) v = delta + uni(rng);
            const Population pop =
                Population::homogeneous(r, scn.lambda, scn.alpha);
            const SlotOutcome o = simulate_slot(pop, cost);
            sum_ibr += o.welfare_ibr;
            sum_flat += o.welfare_flat;
        }
        const double mean_ibr = sum_ibr / scn.trials;
        const double mean_flat = sum_flat / scn.trials;
        const double imp = (mean_ibr - mean_flat) / mean_flat * 100.0;
        out.demand_sweep.rows.push_back({delta, mean_ibr, mean_flat, imp});
    }
    return out;
}

Table run_ee_study(const Scenario& scn) {
    Table t;
    t.name = "ee_study";
    t.columns = {"scale", "demand", "see", "see_c", "iee_baseline",
                 "upa_baseline"};
    const auto& sr = scn.scale_range;
    for (int i = 0; i < sr.points; ++i) {
        const double scale =
            sr.min + (sr.max - sr.min) * static_cast<double>(i) /
                         (sr.points - 1);
        std::vector<double> r(scn.r), m;
        for (double& v : r) v *= scale;
        for (double v : r) m.push_back(0.5 * v);
        const Population unconstrained =
            Population::homogeneous(r, scn.lambda, scn.alpha);
        const Population constrained =
            Population::homogeneous(r, scn.lambda, scn.alpha, m);

        const EeResult see = solve_see(unconstrained);
        const EeResult seec = solve_see_constrained(constrained);

        // Each consumer at its own individual optimum.
        double u_sum = 0.0, x_sum = 0.0;
        for (const auto& prof : unconstrained.sorted()) {
            const auto pt = individual_ee(prof);
            u_sum += eval_utility(pt.x_iee, prof);
            x_sum += pt.x_iee;
        }
        const double ee_iee = u_sum / x_sum;

        // The SEE-C total split uniformly.
        double total = 0.0;
        for (double v : seec.x) total += v;
        double u_upa = 0.0;
        for (const auto& prof : unconstrained.sorted())
            u_upa += eval_utility(total / static_cast<double>(r.size()), prof);
        const double ee_upa = u_upa / total;

        double demand = 0.0;
        for (double v : r) demand += v;
        t.rows.push_back({scale, demand, see.e_star, seec.e_star, ee_iee,
                          ee_upa});
    }
    return t;
}

void emit_outputs(const std::vector<Table>& tables, const Scenario& scn) {
    namespace fs = std::filesystem;
    fs::create_directories(scn.out_dir);
    for (const auto& t : tables) {
        const fs::path path = fs::path(scn.out_dir) / (t.name + ".csv");
        std::ofstream out(path);
        if (!out)
            throw scenario_error("cannot write output: " + path.string());
        for (std::size_t c = 0; c < t.columns.size(); ++c)
            out << (c ? "," : "") << t.columns[c];
        out << "\n";
        for (const auto& row : t.rows) {
            for (std::size_t c = 0; c < row.size(); ++c)
                out << (c ? "," : "") << fmt12(row[c]);
            out << "\n";
        }
    }

    json manifest;
    manifest["seed"] = scn.seed;
    manifest["lambda"] = scn.lambda;
    manifest["alpha"] = scn.alpha;
    manifest["r"] = scn.r;
    manifest["m_policy"] = scn.m_policy;
    manifest["cost"] = {{"a", scn.cost_a}, {"b", scn.cost_b},
                        {"c", scn.cost_c}};
    manifest["study"] = scn.study;
    manifest["trials"] = scn.trials;
    manifest["chi_range"] = {{"min", scn.chi_range.min},
                             {"max", scn.chi_range.max},
                             {"points", scn.chi_range.points}};
    manifest["delta_range"] = {{"min", scn.delta_range.min},
                               {"max", scn.delta_range.max},
                               {"points", scn.delta_range.points}};
    manifest["scale_range"] = {{"min", scn.scale_range.min},
                               {"max", scn.scale_range.max},
                               {"points", scn.scale_range.points}};
    if (scn.slot_table_path) manifest["slot_table"] = *scn.slot_table_path;
    manifest["tables"] = json::array();
    for (const auto& t : tables) manifest["tables"].push_back(t.name);

    std::ofstream mf(std::filesystem::path(scn.out_dir) / "manifest.jsonl");
    mf << manifest.dump() << "\n";
}

} // namespace dres
