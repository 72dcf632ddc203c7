#ifndef ERDY_IO_HPP
#define ERDY_IO_HPP

#include <functional>
#include <iosfwd>
#include <string>

#include "erdy/exact_sim.hpp"
#include "erdy/ode.hpp"
#include "erdy/study.hpp"

// Text export. Every file starts with the format-tag comment line;
// all reals print with 17 significant digits so reruns compare bytewise.
namespace erdy {

void write_trajectory_csv(std::ostream& out, const trajectory& traj);   // t,x_1..x_S
void write_meanfield_csv(std::ostream& out, const mean_field_solution& sol); // t,u_1..u_S
void write_nimfa_csv(std::ostream& out, const nimfa_solution& sol);     // t,y_1..y_S
void write_nimfa_z_csv(std::ostream& out, const nimfa_solution& sol);   // t,vertex,z_1..z_S
void write_event_log(std::ostream& out, const event_log& log);          // t i s k
void write_sim_diagnostics(std::ostream& out, double sup_k, double sup_h, bool have_k,
                           bool have_h);
void write_study_rows_csv(std::ostream& out, const study_result& result);
void write_study_aggregates_csv(std::ostream& out, const study_result& result);
void write_slope_report(std::ostream& out, const study_result& result);

void write_file(const std::string& path, const std::function<void(std::ostream&)>& writer);

} // namespace erdy

#endif
