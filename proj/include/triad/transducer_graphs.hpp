#pragma once

// Flow graphs of the linearized transducer in the resolved-sideband
// approximation. Every edge gain is a function of the microwave offset w
// (the microwave tone sits at omega_m + w).
//
// Anti-Stokes (beam splitter): the optical signal sits at omega_L + omega_m + w.
// Stokes (two-mode squeezer): the optical signal sits at omega_L - omega_m - w
// and is represented by conjugate ("_dag") nodes, so one graph evaluated at w
// carries every port pair.

#include <cmath>
#include <complex>

#include "triad/hybridize.hpp"
#include "triad/sfg.hpp"

namespace triad {

/// chi[w] = 1 / (-i w + kappa / 2)
inline cplx susceptibility(double kappa, double w) { return 1.0 / cplx(0.5 * kappa, -w); }

namespace sfg {

inline FlowGraph build_antistokes_graph(const OperatingPoint& op) {
  const double km = op.mech.kappa_m, kem = op.mech.kappa_ex_m;
  const double kp = op.modes.kappa_plus, kep = op.modes.kappa_ex_plus;
  const double kmn = op.modes.kappa_minus, kemn = op.modes.kappa_ex_minus;
  const double ds = op.signal_detuning, wso = op.spectator_offset();
  const cplx g = op.couplings.g_plus;
  const cplx i(0.0, 1.0);

  FlowGraph gr;
  gr.add_node("c_in", NodeRole::Source);
  gr.add_node("a_in", NodeRole::Source);
  gr.add_node("b");
  gr.add_node("a_plus");
  gr.add_node("a_minus");
  gr.add_node("a_out", NodeRole::Sink);
  gr.add_node("c_out", NodeRole::Sink);

  gr.add_edge("c_in", "b", [=](double w) { return std::sqrt(kem) * susceptibility(km, w); },
              "sqrt(k_ex,m) chi_m");
  gr.add_edge("b", "a_plus", [=](double w) { return i * g * susceptibility(kp, w + ds); },
              "i g+ chi+");
  gr.add_edge("a_plus", "b", [=](double w) { return i * std::conj(g) * susceptibility(km, w); },
              "i g+* chi_m");
  gr.add_edge("a_in", "a_plus", [=](double w) { return std::sqrt(kep) * susceptibility(kp, w + ds); },
              "sqrt(k_ex,+) chi+");
  gr.add_edge("a_in", "a_minus",
              [=](double w) { return std::sqrt(kemn) * susceptibility(kmn, w + wso); },
              "sqrt(k_ex,-) chi-[w+ws]");
  gr.add_edge("a_plus", "a_out", [=](double) { return cplx(-std::sqrt(kep)); }, "-sqrt(k_ex,+)");
  gr.add_edge("a_minus", "a_out", [=](double) { return cplx(-std::sqrt(kemn)); },
              "-sqrt(k_ex,-)");
  gr.add_edge("b", "c_out", [=](double) { return cplx(std::sqrt(kem)); }, "sqrt(k_ex,m)");
  gr.add_edge("a_in", "a_out", [](double) { return cplx(1.0); }, "1");
  gr.add_edge("c_in", "c_out", [](double) { return cplx(-1.0); }, "-1");
  return gr;
}

inline FlowGraph build_stokes_graph(const OperatingPoint& op) {
  const double km = op.mech.kappa_m, kem = op.mech.kappa_ex_m;
  const double kmn = op.modes.kappa_minus, kemn = op.modes.kappa_ex_minus;
  const double kp = op.modes.kappa_plus, kep = op.modes.kappa_ex_plus;
  const double ds = op.signal_detuning, wso = op.spectator_offset();
  const cplx g = op.couplings.g_minus;
  const cplx i(0.0, 1.0);

  FlowGraph gr;
  gr.add_node("c_in", NodeRole::Source);
  gr.add_node("a_in_dag", NodeRole::Source);
  gr.add_node("b");
  gr.add_node("a_minus_dag");
  gr.add_node("a_plus_dag");
  gr.add_node("a_out_dag", NodeRole::Sink);
  gr.add_node("c_out", NodeRole::Sink);

  gr.add_edge("c_in", "b", [=](double w) { return std::sqrt(kem) * susceptibility(km, w); },
              "sqrt(k_ex,m) chi_m");
  gr.add_edge("b", "a_minus_dag",
              [=](double w) { return -i * std::conj(g) * susceptibility(kmn, w + ds); }, "-i g-* chi-");
  gr.add_edge("a_minus_dag", "b", [=](double w) { return i * g * susceptibility(km, w); },
              "i g- chi_m");
  gr.add_edge("a_in_dag", "a_minus_dag",
              [=](double w) { return std::sqrt(kemn) * susceptibility(kmn, w + ds); },
              "sqrt(k_ex,-) chi-");
  gr.add_edge("a_in_dag", "a_plus_dag",
              [=](double w) { return std::sqrt(kep) * susceptibility(kp, w + wso); },
              "sqrt(k_ex,+) chi+[w+ws]");
  gr.add_edge("a_minus_dag", "a_out_dag", [=](double) { return cplx(-std::sqrt(kemn)); },
              "-sqrt(k_ex,-)");
  gr.add_edge("a_plus_dag", "a_out_dag", [=](double) { return cplx(-std::sqrt(kep)); },
              "-sqrt(k_ex,+)");
  gr.add_edge("b", "c_out", [=](double) { return cplx(std::sqrt(kem)); }, "sqrt(k_ex,m)");
  gr.add_edge("a_in_dag", "a_out_dag", [](double) { return cplx(1.0); }, "1");
  gr.add_edge("c_in", "c_out", [](double) { return cplx(-1.0); }, "-1");
  return gr;
}

inline FlowGraph build_graph(const OperatingPoint& op) {
  return op.configuration == Configuration::AntiStokes ? build_antistokes_graph(op)
                                                       : build_stokes_graph(op);
}

enum class Port { Optical, Microwave };

// Graph node names of a port pair for the given configuration.
inline const char* input_node(Configuration c, Port p) {
  if (p == Port::Microwave) return "c_in";
  return c == Configuration::AntiStokes ? "a_in" : "a_in_dag";
}

inline const char* output_node(Configuration c, Port p) {
  if (p == Port::Microwave) return "c_out";
  return c == Configuration::AntiStokes ? "a_out" : "a_out_dag";
}

}  // namespace sfg
}  // namespace triad
