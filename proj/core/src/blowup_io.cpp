#include <istream>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <set>
#include <string>

#include "denjoy/blowup.hpp"
#include "denjoy/error.hpp"

namespace denjoy::blowup {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "denjoy.ballsystem";

json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vector json_vector(const json& a) {
  if (!a.is_array()) throw Error(ErrorCode::MalformedRecord, "expected a numeric array");
  Vector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw Error(ErrorCode::MalformedRecord, "expected a number");
    v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  }
  return v;
}

void emit(std::ostream& out, const char* key, json value) {
  json line;
  line[key] = std::move(value);
  out << line.dump() << '\n';
}

}  // namespace

void write_ball_system(std::ostream& out, const BallSystem& system) {
  out << json{{"format", kFormat}, {"version", kRecordVersion}}.dump() << '\n';
  emit(out, "k", system.dimension());
  emit(out, "theta", vector_json(system.theta().theta));
  emit(out, "declared_irrational", system.theta().declared_irrational);
  emit(out, "seed", vector_json(system.seed()));
  emit(out, "J", system.window());
  json centers = json::array();
  json radii = json::array();
  for (int j = -system.window(); j <= system.window(); ++j) {
    centers.push_back(vector_json(system.center(j)));
    radii.push_back(system.radius(j));
  }
  emit(out, "centers", std::move(centers));
  emit(out, "radii", std::move(radii));
  emit(out, "budget", system.budget());
  json log = json::array();
  for (const auto& e : system.repair_log()) {
    log.push_back({{"kind", e.kind},
                   {"index", e.index},
                   {"against", e.against},
                   {"old_radius", e.old_radius},
                   {"new_radius", e.new_radius},
                   {"factor", e.factor}});
  }
  emit(out, "repair_log", std::move(log));
}

BallSystem read_ball_system(std::istream& in) {
  static const std::set<std::string> required = {"k",  "theta",   "declared_irrational",
                                                 "seed", "J",     "centers",
                                                 "radii", "budget", "repair_log"};
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, json> fields;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!header) {
      if (!j.is_object() || j.value("format", "") != kFormat) {
        throw Error(ErrorCode::MalformedRecord, "missing ball-system header");
      }
      if (j.value("version", -1) != kRecordVersion) {
        throw Error(ErrorCode::MalformedRecord, "unsupported record version");
      }
      header = true;
      continue;
    }
    if (!j.is_object() || j.size() != 1) {
      throw Error(ErrorCode::MalformedRecord,
                  "line " + std::to_string(line_no) + ": expected a single-field object");
    }
    const std::string key = j.begin().key();
    if (!required.count(key)) {
      throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line_no) + ": unknown field " + key);
    }
    if (!fields.emplace(key, j.begin().value()).second) {
      throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line_no) + ": duplicate field " + key);
    }
  }
  for (const auto& key : required) {
    if (!fields.count(key)) throw Error(ErrorCode::MalformedRecord, "missing field " + key);
  }

  try {
    const int k = fields["k"].get<int>();
    TranslationVector theta;
    theta.theta = json_vector(fields["theta"]);
    theta.declared_irrational = fields["declared_irrational"].get<bool>();
    const Vector seed = json_vector(fields["seed"]);
    if (theta.dimension() != k || seed.size() != k) {
      throw Error(ErrorCode::MalformedRecord, "theta/seed dimension disagrees with k");
    }
    const int window = fields["J"].get<int>();
    std::vector<Vector> centers;
    for (const auto& c : fields["centers"]) centers.push_back(json_vector(c));
    const auto radii = fields["radii"].get<std::vector<double>>();
    std::vector<RepairEntry> log;
    for (const auto& e : fields["repair_log"]) {
      log.push_back(RepairEntry{e.at("kind").get<std::string>(), e.at("index").get<int>(),
                                e.at("against").get<int>(), e.at("old_radius").get<double>(),
                                e.at("new_radius").get<double>(), e.at("factor").get<double>()});
    }
    return BallSystem::from_parts(theta, seed, window, centers, radii, fields["budget"].get<double>(),
                                  std::move(log));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, e.what());
  }
}

}  // namespace denjoy::blowup
