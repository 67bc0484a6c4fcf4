#pragma once

// Flow equations as printed, one right-hand side per field. Jets along the
// space variable use the library's symbol names.

#include <string>
#include <vector>

namespace golden {

struct FlowLine {
  std::string field;
  std::string rhs;
};

struct PrintedFlow {
  std::string label;
  std::vector<FlowLine> lines;
};

// u-form, g=1, space x3.
inline PrintedFlow dckdv_g1_x5() {
  return {"dcKdV g=1 x5",
          {{"u[2]", "-3/2*du[2]/dx[3]*u[2] + du[1]/dx[3]"},
           {"u[1]", "du[0]/dx[3] - 1/2*du[1]/dx[3]*u[2] - du[2]/dx[3]*u[1]"},
           {"u[0]", "-1/2*du[0]/dx[3]*u[2] - du[2]/dx[3]*u[0]"}}};
}

inline PrintedFlow dckdv_g1_x7() {
  return {"dcKdV g=1 x7",
          {{"u[2]", "-3/2*du[1]/dx[3]*u[2] + 15/8*du[2]/dx[3]*u[2]^2 - 3/2*du[2]/dx[3]*u[1] + du[0]/dx[3]"},
           {"u[1]",
            "-1/2*du[0]/dx[3]*u[2] - 3/2*u[1]*du[1]/dx[3] + 3/2*du[2]/dx[3]*u[1]*u[2] - du[2]/dx[3]*u[0]"
            " + 3/8*du[1]/dx[3]*u[2]^2"},
           {"u[0]", "-u[0]*du[1]/dx[3] - 1/2*du[0]/dx[3]*u[1] + 3/8*du[0]/dx[3]*u[2]^2 + 3/2*du[2]/dx[3]*u[0]*u[2]"}}};
}

// u-form, g=2, x7 flow, space x5.
inline PrintedFlow dckdv_g2_x7() {
  return {"dcKdV g=2 x7",
          {{"u[4]", "du[3]/dx[5] - 3/2*du[4]/dx[5]*u[4]"},
           {"u[3]", "du[2]/dx[5] - du[4]/dx[5]*u[3] - 1/2*du[3]/dx[5]*u[4]"},
           {"u[2]", "du[1]/dx[5] - du[4]/dx[5]*u[2] - 1/2*du[2]/dx[5]*u[4]"},
           {"u[1]", "du[0]/dx[5] - 1/2*du[1]/dx[5]*u[4] - du[4]/dx[5]*u[1]"},
           {"u[0]", "-1/2*du[0]/dx[5]*u[4] - du[4]/dx[5]*u[0]"}}};
}

// Conservation-law fluxes of the g=2 x7 flow with v_j = H[5][j]. The last
// line is printed with "v_{-1} v_{-2}"; v_{-2} is not a variable, and
// H[7][5] fixes it as v_{-1} v_3.
inline PrintedFlow fluxes_g2_x7() {
  return {"conservation laws g=2 x7",
          {{"H[5][-3]", "H[5][-1] - H[5][-3]^2"},
           {"H[5][-1]", "H[5][1] - H[5][-3]*H[5][-1]"},
           {"H[5][1]", "H[5][3] - H[5][-3]*H[5][1]"},
           {"H[5][3]", "H[5][5] - H[5][-3]*H[5][3]"},
           {"H[5][5]", "-2*H[5][-3]*H[5][5] - H[5][-1]*H[5][3] - 1/2*H[5][1]^2"}}};
}

inline PrintedFlow moduli_x5() {
  return {"moduli x5",
          {{"g2", "dg3/dx[3] - 5/6*dg2/dx[3]*u[2] - 2/3*du[2]/dx[3]*g2"},
           {"g3", "-5/6*dg3/dx[3]*u[2] - 1/3*dg2/dx[3]*g2 - du[2]/dx[3]*g3"},
           {"u[2]", "dg2/dx[3] - 5/6*du[2]/dx[3]*u[2]"}}};
}

inline PrintedFlow moduli_x7() {
  return {"moduli x7",
          {{"g2",
            "-7/6*u[2]*dg3/dx[3] + 7/9*u[2]*du[2]/dx[3]*g2 + 35/72*u[2]^2*dg2/dx[3] - 3/2*g2*dg2/dx[3]"
            " - du[2]/dx[3]*g3"},
           {"g3",
            "7/6*g3*du[2]/dx[3]*u[2] - g3*dg2/dx[3] - 5/6*dg3/dx[3]*g2 + 35/72*dg3/dx[3]*u[2]^2"
            " + 2/9*du[2]/dx[3]*g2^2 + 7/18*u[2]*g2*dg2/dx[3]"},
           {"u[2]", "-7/6*u[2]*dg2/dx[3] + 35/72*du[2]/dx[3]*u[2]^2 - 7/6*du[2]/dx[3]*g2 + dg3/dx[3]"}}};
}

// S = S_{-1}. The printed x7 g3 line keeps one du[2]/dx[3], which is
// 2 dS/dx[3]dx[3] in these variables. The x7 g2 line is printed with
// -3 g2 dg2/dx[3]; that term has no u[2] in it, so u[2] = 2 dS/dx[3] cannot
// change the -3/2 of the u[2]-form line, and -3/2 is kept here.
inline PrintedFlow moduli_S_x5() {
  return {"moduli S-form x5",
          {{"g2", "dg3/dx[3] - 5/3*dg2/dx[3]*dS/dx[3] - 4/3*dS/dx[3]dx[3]*g2"},
           {"g3", "-5/3*dg3/dx[3]*dS/dx[3] - 1/3*dg2/dx[3]*g2 - 2*dS/dx[3]dx[3]*g3"},
           {"S", "1/2*g2 - 5/6*dS/dx[3]^2"}}};
}

inline PrintedFlow moduli_S_x7() {
  return {"moduli S-form x7",
          {{"g2",
            "-7/3*dS/dx[3]*dg3/dx[3] + 28/9*dS/dx[3]*dS/dx[3]dx[3]*g2 + 35/18*dS/dx[3]^2*dg2/dx[3]"
            " - 3/2*g2*dg2/dx[3] - 2*dS/dx[3]dx[3]*g3"},
           {"g3",
            "7/3*g3*(2*dS/dx[3]dx[3])*dS/dx[3] - g3*dg2/dx[3] - 5/6*dg3/dx[3]*g2 + 35/18*dg3/dx[3]*dS/dx[3]^2"
            " + 4/9*dS/dx[3]dx[3]*g2^2 + 7/9*g2*dS/dx[3]*dg2/dx[3]"},
           {"S", "-7/6*g2*dS/dx[3] + 35/54*dS/dx[3]^3 + 1/2*g3"}}};
}

inline std::string moduli_S_x7_g2_as_printed() {
  return "-7/3*dS/dx[3]*dg3/dx[3] + 28/9*dS/dx[3]*dS/dx[3]dx[3]*g2 + 35/18*dS/dx[3]^2*dg2/dx[3]"
         " - 3*g2*dg2/dx[3] - 2*dS/dx[3]dx[3]*g3";
}

// d Delta / dx5 with Delta = -16(4 g2^3 + 27 g3^2).
inline std::string discriminant_x5() {
  return "-192*g2^2*dg3/dx[3] + 128*g2^3*du[2]/dx[3] + 160*g2^2*u[2]*dg2/dx[3] + 720*g3*u[2]*dg3/dx[3]"
         " + 864*du[2]/dx[3]*g3^2 + 288*g3*g2*dg2/dx[3]";
}

inline PrintedFlow constrained_x5() {
  return {"u0=0 x5",
          {{"u[2]", "-3/2*du[2]/dx[3]*u[2] + du[1]/dx[3]"}, {"u[1]", "-1/2*du[1]/dx[3]*u[2] - du[2]/dx[3]*u[1]"}}};
}

inline PrintedFlow constrained_moduli_x5() {
  return {"u0=0 moduli x5",
          {{"g2", "-1/9*u[2]^2*du[2]/dx[3] - 7/6*dg2/dx[3]*u[2] - du[2]/dx[3]*g2"},
           {"u[2]", "dg2/dx[3] - 5/6*du[2]/dx[3]*u[2]"}}};
}

// d Delta / dx5 with Delta = 16 u1^2 (u2^2 - 4 u1) at u0 = 0, in (g2, u2).
inline std::string discriminant_constrained_x5() {
  return "592/3*u[2]^2*g2^2*du[2]/dx[3] + 192*g2^3*du[2]/dx[3] + 128*g2^2*u[2]*dg2/dx[3]"
         " + 112/27*u[2]^6*du[2]/dx[3] + 512/9*u[2]^4*du[2]/dx[3]*g2 + 80/9*u[2]^5*dg2/dx[3]"
         " + 208/3*u[2]^3*g2*dg2/dx[3]";
}

inline PrintedFlow benney() {
  return {"Benney", {{"u", "-u*du/dx[3] - dv/dx[3]"}, {"v", "-u*dv/dx[3] - v*du/dx[3]"}}};
}

}  // namespace golden
