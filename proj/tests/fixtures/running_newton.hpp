// Generated by tests/oracle/newton_running.cpp; do not edit.
// Newton residual 8.132e-19
#pragma once

namespace oracle {

struct NewtonSlot {
  int i;
  int j;
  long double value;
};

inline constexpr NewtonSlot running_newton[] = {
    {0, 2, 1.000000000000000000000e+00L},
    {0, 3, -1.875000000000000000000e-01L},
    {1, 2, -2.208333333333333333180e-01L},
    {0, 4, 2.142857142857142857182e-01L},
    {1, 3, 1.693452380952380952267e-01L},
    {2, 2, 7.361408730158730159528e-01L},
    {0, 5, 3.409090909090909090934e-01L},
    {1, 4, 9.042207792207792208081e-02L},
    {2, 3, -1.082819264069264069138e-01L},
    {3, 2, -9.875965007215007216470e-02L},
};

}  // namespace oracle
