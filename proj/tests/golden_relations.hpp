#pragma once

#include <string>
#include <utility>
#include <vector>

// Printed relations, transcribed as lhs = rhs text. Each must reduce to zero
// under the derived relation set of the matching genus.
namespace golden {

struct Relation {
  int genus;
  std::string lhs, rhs;
};

inline const std::vector<Relation>& printed_relations() {
  static const std::vector<Relation> rel = {
      // big cell, lowest relations and their closed forms
      {0, "H[1][1]^2 + 2*H[1][3]", "0"},
      {0, "H[1][5] + H[1][3]*H[1][1]", "0"},
      {0, "H[3][3] - 3*H[1][5] - 3*H[1][3]*H[1][1] - H[1][1]^3", "0"},
      {0, "2*H[1][7] + 2*H[1][5]*H[1][1] + H[1][3]^2", "0"},
      {0, "3*H[1][3]", "H[3][1]"},
      {0, "5*H[1][5]", "H[5][1]"},
      {0, "7*H[1][7]", "H[7][1]"},
      {0, "H[3][1] + 3/2*H[1][1]^2", "0"},
      {0, "H[5][1] - 5/2*H[1][1]^3", "0"},
      {0, "H[3][3] - H[1][1]^3", "0"},
      {0, "H[7][1] + 35/8*H[1][1]^4", "0"},
      // elliptic stratum
      {1, "H[5][-1]", "H[3][1] - H[3][-1]^2"},
      {1, "H[5][1]", "-H[3][-1]*H[3][1] + H[3][3]"},
      {1, "H[5][3]", "-1/2*H[3][1]^2 - 2*H[3][3]*H[3][-1]"},
      {1, "H[7][-1]", "-2*H[3][-1]*H[3][1] + H[3][3] + H[3][-1]^3"},
      {1, "H[7][1]", "-3/2*H[3][1]^2 + H[3][1]*H[3][-1]^2 - 2*H[3][3]*H[3][-1]"},
      {1, "H[7][3]", "H[3][-1]*H[3][1]^2 + 3*H[3][3]*H[3][-1]^2 - 2*H[3][1]*H[3][3]"},
      {1, "5*H[3][5] - 3*H[5][3]", "-H[3][1]^2 + H[3][3]*H[3][-1]"},
      {1, "7*H[3][7] - 3*H[7][3]", "1/2*H[3][-1]*H[3][1]^2 - 2*H[3][3]*H[3][-1]^2 - H[3][1]*H[3][3]"},
      {1, "9*H[3][9] - 3*H[9][3]", "3*H[3][3]*H[3][-1]^3 + 3/2*H[3][1]^3"},
      {1, "7*H[5][7] - 5*H[7][5]",
       "H[3][3]*H[3][-1]^3 - 3/2*H[3][1]^3 + H[3][1]*H[3][3]*H[3][-1] + 1/2*H[3][-1]^2*H[3][1]^2 - H[3][3]^2"},
      // genus two
      {2, "H[7][-3]", "H[5][-1] - H[5][-3]^2"},
      {2, "H[7][-1]", "H[5][1] - H[5][-3]*H[5][-1]"},
      {2, "H[7][1]", "H[5][3] - H[5][-3]*H[5][1]"},
      {2, "H[7][3]", "H[5][5] - H[5][3]*H[5][-3]"},
      {2, "H[7][5]", "-H[5][-1]*H[5][3] - 1/2*H[5][1]^2 - 2*H[5][5]*H[5][-3]"},
      {2, "H[9][-3]", "H[5][1] - 2*H[5][-3]*H[5][-1] + H[5][-3]^3"},
      {2, "H[9][-1]", "-H[5][-1]^2 + H[5][-1]*H[5][-3]^2 + H[5][3] - H[5][-3]*H[5][1]"},
      {2, "H[9][1]", "H[5][5] - H[5][3]*H[5][-3] - H[5][1]*H[5][-1] + H[5][1]*H[5][-3]^2"},
      {2, "H[9][3]", "-2*H[5][-1]*H[5][3] + H[5][3]*H[5][-3]^2 - 1/2*H[5][1]^2 - 2*H[5][5]*H[5][-3]"},
      {2, "H[9][5]",
       "-2*H[5][-1]*H[5][5] + 3*H[5][5]*H[5][-3]^2 + 2*H[5][-3]*H[5][-1]*H[5][3] + H[5][-3]*H[5][1]^2 - "
       "H[5][3]*H[5][1]"},
  };
  return rel;
}

}  // namespace golden
