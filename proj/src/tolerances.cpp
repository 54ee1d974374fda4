#include "lsurf/tolerances.hpp"

#include "lsurf/error.hpp"

namespace lsurf {

namespace {

struct Entry {
  const char* key;
  double Tolerances::*field;
};

constexpr Entry kEntries[] = {
    {"metric", &Tolerances::metric},
    {"lightlike", &Tolerances::lightlike},
    {"minimal", &Tolerances::minimal},
    {"frame", &Tolerances::frame},
    {"integrability", &Tolerances::integrability},
    {"beltrami", &Tolerances::beltrami},
    {"laplacian", &Tolerances::laplacian},
    {"harmonic", &Tolerances::harmonic},
    {"fit", &Tolerances::fit},
    {"first_kind", &Tolerances::first_kind},
    {"c_zero", &Tolerances::c_zero},
    {"phi_spread", &Tolerances::phi_spread},
    {"drift", &Tolerances::drift},
    {"goursat", &Tolerances::goursat},
    {"verify", &Tolerances::verify},
};

}  // namespace

void Tolerances::set(const std::string& key, double value) {
  if (!(value > 0))
    throw Error(ErrorCode::BadInput, "tolerance must be positive")
        .with("key", key);
  for (const Entry& e : kEntries) {
    if (key == e.key) {
      this->*e.field = value;
      return;
    }
  }
  throw Error(ErrorCode::BadInput, "unknown tolerance key").with("key", key);
}

std::vector<std::pair<std::string, double>> Tolerances::entries() const {
  std::vector<std::pair<std::string, double>> out;
  for (const Entry& e : kEntries) out.emplace_back(e.key, this->*e.field);
  return out;
}

}  // namespace lsurf
