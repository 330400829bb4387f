#include <cstdio>

#include "mgt/report.hpp"

int main() {
  const auto rep = mgt::acceptance({});
  for (const auto& c : rep.criteria)
    std::printf("%s  %-28s (%.2f s)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                c.seconds);
  std::printf("%s  %zu criteria\n", rep.all_pass ? "PASS" : "FAIL",
              rep.criteria.size());
  return rep.all_pass ? 0 : 1;
}
