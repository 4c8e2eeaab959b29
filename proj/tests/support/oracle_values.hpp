#pragma once

// Frozen output of tests/oracle/derive_oracles.py (mpmath, 40 digits).
// Regenerate with: python3 tests/oracle/derive_oracles.py

namespace oracle {

inline constexpr double Z_q3_n2_beta1 = 2.192526229853341415790485;
inline constexpr double Z_q2_n1_beta1p3 = 2.334648333809622110228745;
inline constexpr double Z_q2_n2_beta0p7 = 2.142214526458441714621426;

inline constexpr double alpha_beta2_diag_0p6 = 0.5833165011302497367367339;    // gamma = nu = (.6,.2,.2)
inline constexpr double alpha_beta1p5_mixed = -0.1685397036214689139582643;    // (.5,.3,.2), (.1,.1,.8)
inline constexpr double lmgf_e1_zero = 0.4528324252639413976602253;           // Gamma((1,0,0),(0,0,0))
inline constexpr double g_q3_beta2_e1_first = 0.7869860421615984989789078;
inline constexpr double g_q3_beta2_e1_rest = 0.1065069789192007505105461;
inline constexpr double Dg_q3_beta1_rho_to_0p8 = 0.3367597296444164024095179;  // rho -> (.8,.1,.1)
inline constexpr double rel_entropy_half_half_zero = 0.4054651081081643819780131;

inline constexpr double beta_c_q3 = 2.772588722239781237668928;
inline constexpr double beta_c_q4 = 3.295836866004329074185736;
inline constexpr double beta_s_q3 = 2.745643576732724396883466;
inline constexpr double t_star_q3 = 0.5848004181796268449160314;
inline constexpr double beta_s_q4 = 3.218741088336956245629676;
inline constexpr double t_star_q4 = 0.6303443367887162672809151;
inline constexpr double beta_s_q5 = 3.564501808493887034911743;
inline constexpr double t_star_q5 = 0.6598896781689714596725352;

inline constexpr double s_q3_beta10 = 0.9998636267434877438726244;
inline constexpr double s_q3_beta3 = 0.71637526663568751402636;

}  // namespace oracle
