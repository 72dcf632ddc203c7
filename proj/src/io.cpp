#include "erdy/io.hpp"

#include <fstream>
#include <functional>
#include <ostream>

namespace erdy {

namespace {
void tag(std::ostream& out) { out << "# " << format_tag << "\n"; }
} // namespace

void write_trajectory_csv(std::ostream& out, const trajectory& traj) {
    tag(out);
    const std::size_t s = traj.x.empty() ? 0 : traj.x.front().size();
    out << "t";
    for (std::size_t k = 1; k <= s; ++k) out << ",x_" << k;
    out << "\n";
    for (std::size_t g = 0; g < traj.times.size(); ++g) {
        out << g17(traj.times[g]);
        for (std::size_t k = 0; k < s; ++k) out << "," << g17(traj.x[g][k]);
        out << "\n";
    }
}

void write_meanfield_csv(std::ostream& out, const mean_field_solution& sol) {
    tag(out);
    const std::size_t s = sol.u.empty() ? 0 : sol.u.front().size();
    out << "t";
    for (std::size_t k = 1; k <= s; ++k) out << ",u_" << k;
    out << "\n";
    for (std::size_t g = 0; g < sol.times.size(); ++g) {
        out << g17(sol.times[g]);
        for (std::size_t k = 0; k < s; ++k) out << "," << g17(sol.u[g][k]);
        out << "\n";
    }
}

void write_nimfa_csv(std::ostream& out, const nimfa_solution& sol) {
    tag(out);
    const std::size_t s = sol.y.empty() ? 0 : sol.y.front().size();
    out << "t";
    for (std::size_t k = 1; k <= s; ++k) out << ",y_" << k;
    out << "\n";
    for (std::size_t g = 0; g < sol.times.size(); ++g) {
        out << g17(sol.times[g]);
        for (std::size_t k = 0; k < s; ++k) out << "," << g17(sol.y[g][k]);
        out << "\n";
    }
}

void write_nimfa_z_csv(std::ostream& out, const nimfa_solution& sol) {
    if (!sol.has_z) throw invalid_config("per-vertex dump requires stored snapshots");
    tag(out);
    const auto s = static_cast<std::size_t>(sol.state_count);
    out << "t,vertex";
    for (std::size_t k = 1; k <= s; ++k) out << ",z_" << k;
    out << "\n";
    for (std::size_t g = 0; g < sol.times.size(); ++g) {
        for (std::int64_t i = 0; i < sol.n; ++i) {
            out << g17(sol.times[g]) << "," << i;
            for (std::size_t k = 0; k < s; ++k)
                out << "," << g17(sol.z[g][static_cast<std::size_t>(i) * s + k]);
            out << "\n";
        }
    }
}

void write_event_log(std::ostream& out, const event_log& log) {
    tag(out);
    for (const auto& ev : log.events)
        out << g17(ev.t) << " " << ev.vertex << " " << static_cast<int>(ev.from) << " "
            << static_cast<int>(ev.to) << "\n";
}

void write_sim_diagnostics(std::ostream& out, double sup_k, double sup_h, bool have_k,
                           bool have_h) {
    tag(out);
    if (have_k) out << "sup_k " << g17(sup_k) << "\n";
    if (have_h) out << "sup_h " << g17(sup_h) << "\n";
}

void write_study_rows_csv(std::ostream& out, const study_result& result) {
    tag(out);
    out << "n,seed,status,sup_err_x,sup_err_y,r1,r2,r2_mode,sup_k,sup_h,gronwall_slack,"
           "lm_ratio,wall_ms\n";
    for (const auto& r : result.rows) {
        out << r.n << "," << r.seed << "," << r.status << "," << g17(r.sup_err_x) << ","
            << g17(r.sup_err_y) << "," << g17(r.r1) << "," << g17(r.r2) << "," << r.r2_mode
            << "," << g17(r.sup_k) << "," << g17(r.sup_h) << "," << g17(r.gronwall_slack)
            << "," << g17(r.lm_ratio) << "," << g17(r.wall_ms) << "\n";
    }
}

void write_study_aggregates_csv(std::ostream& out, const study_result& result) {
    tag(out);
    out << "n,metric,mean,median,stderr\n";
    for (const auto& a : result.aggregates)
        out << a.n << "," << a.metric << "," << g17(a.mean) << "," << g17(a.median) << ","
            << g17(a.std_error) << "\n";
}

void write_slope_report(std::ostream& out, const study_result& result) {
    tag(out);
    for (const auto& [metric, fit] : result.slopes)
        out << metric << " " << g17(fit.slope) << " " << g17(fit.intercept) << " "
            << g17(fit.r2_fit) << "\n";
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& writer) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    writer(out);
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace erdy
