#include "core/problems.hpp"

namespace regstop {

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names = {"hammerstein", "diffusion1d", "autoconv"};
  return names;
}

ProblemPtr make_problem(const std::string& name, const ProblemOptions& opts) {
  if (name == "hammerstein") return make_hammerstein(opts.n > 0 ? opts.n : 128);
  if (name == "diffusion1d")
    return make_diffusion1d(opts.n > 0 ? opts.n : 50, opts.fine_factor > 0 ? opts.fine_factor : 4);
  if (name == "autoconv") return make_autoconv(opts.n > 0 ? opts.n : 60);
  std::string known;
  for (const auto& k : problem_names()) known += (known.empty() ? "" : ", ") + k;
  throw std::invalid_argument("unknown problem '" + name + "' (known: " + known + ")");
}

}  // namespace regstop
