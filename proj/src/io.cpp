/*
Copyright 2026 The odfkit Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include "odfkit/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "odfkit/version.hpp"

namespace odf {

namespace {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgumentError("cannot open file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InvalidArgumentError(path + ": invalid JSON (" + e.what() + ")");
  }
  return doc;
}

Vec3 vec_from_json(const json& arr, const std::string& path) {
  if (!arr.is_array() || arr.size() != 3) {
    throw InvalidArgumentError(path + ": direction must be a 3-vector");
  }
  return Vec3(arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>());
}

}  // namespace

Fodf read_fodf(const std::string& path) {
  const json doc = parse_json_file(path);
  if (doc.contains("atoms")) {
    std::vector<WeightedDirection> atoms;
    for (const auto& entry : doc["atoms"]) {
      if (!entry.contains("dir") || !entry.contains("w")) {
        throw InvalidArgumentError(path + ": atom needs \"dir\" and \"w\"");
      }
      atoms.push_back({Direction::normalized(vec_from_json(entry["dir"], path)),
                       entry["w"].get<double>()});
    }
    try {
      return Fodf(DiscreteFodf(std::move(atoms)));
    } catch (const InvalidArgumentError& e) {
      throw InvalidArgumentError(path + ": " + e.what());
    }
  }
  if (doc.contains("grid_p") && doc.contains("weights")) {
    const std::size_t p = doc["grid_p"].get<std::size_t>();
    const auto& w = doc["weights"];
    if (!w.is_array() || w.size() != p) {
      throw InvalidArgumentError(path + ": weights length must equal grid_p");
    }
    Eigen::VectorXd weights(static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i) {
      weights[static_cast<Eigen::Index>(i)] = w[i].get<double>();
    }
    try {
      return Fodf(GridFodf(make_grid(p), std::move(weights)));
    } catch (const InvalidArgumentError& e) {
      throw InvalidArgumentError(path + ": " + e.what());
    }
  }
  throw InvalidArgumentError(path +
                             ": fODF document needs \"atoms\" or \"grid_p\"+\"weights\"");
}

void write_fodf(const std::string& path, const Fodf& f) {
  json doc;
  doc["version"] = kVersion;
  if (const auto* d = std::get_if<DiscreteFodf>(&f)) {
    json atoms = json::array();
    for (const auto& a : d->atoms()) {
      atoms.push_back({{"dir", {a.dir.x(), a.dir.y(), a.dir.z()}}, {"w", a.weight}});
    }
    doc["atoms"] = std::move(atoms);
  } else {
    const auto& g = std::get<GridFodf>(f);
    doc["grid_p"] = g.grid().size();
    json weights = json::array();
    for (Eigen::Index i = 0; i < g.weights().size(); ++i) {
      weights.push_back(g.weights()[i]);
    }
    doc["weights"] = std::move(weights);
  }
  atomic_write(path, doc.dump(2) + "\n");
}

SignalTable read_signal(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgumentError("cannot open file: " + path);
  SignalTable table;
  std::vector<double> values;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    if (!header_seen) {
      std::string c1, c2, c3, c4;
      fields >> c1 >> c2 >> c3 >> c4;
      if (c1 != "bx" || c2 != "by" || c3 != "bz" || c4 != "y") {
        throw InvalidArgumentError(path + ": header row \"bx by bz y\" required");
      }
      header_seen = true;
      continue;
    }
    double bx, by, bz, y;
    if (!(fields >> bx >> by >> bz >> y)) {
      throw InvalidArgumentError(path + ": malformed signal row: " + line);
    }
    table.dirs.push_back(Direction::normalized(Vec3(bx, by, bz)));
    values.push_back(y);
  }
  if (!header_seen) {
    throw InvalidArgumentError(path + ": header row \"bx by bz y\" required");
  }
  if (values.empty()) {
    throw InvalidArgumentError(path + ": no measurements");
  }
  table.y = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                              static_cast<Eigen::Index>(values.size()));
  return table;
}

void write_signal(const std::string& path, const std::vector<Direction>& dirs,
                  const Eigen::VectorXd& y, const std::string& meta) {
  std::ostringstream out;
  out << "# odfkit " << kVersion << " " << meta << "\n";
  out << "bx\tby\tbz\ty\n";
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    out << format_double(dirs[i].x()) << "\t" << format_double(dirs[i].y()) << "\t"
        << format_double(dirs[i].z()) << "\t"
        << format_double(y[static_cast<Eigen::Index>(i)]) << "\n";
  }
  atomic_write(path, out.str());
}

VoxelDataset read_voxel_dataset(const std::string& path) {
  const json doc = parse_json_file(path);
  if (!doc.contains("dirs") || !doc.contains("voxels")) {
    throw InvalidArgumentError(path + ": dataset needs \"dirs\" and \"voxels\"");
  }
  VoxelDataset data;
  for (const auto& d : doc["dirs"]) {
    data.dirs.push_back(Direction::normalized(vec_from_json(d, path)));
  }
  const std::size_t n = data.dirs.size();
  std::size_t counter = 0;
  for (const auto& v : doc["voxels"]) {
    VoxelDataset::Voxel vox;
    vox.id = v.contains("id") ? (v["id"].is_string() ? v["id"].get<std::string>()
                                                     : v["id"].dump())
                              : "voxel_" + std::to_string(counter);
    ++counter;
    try {
      if (!v.contains("y1") || !v["y1"].is_array()) {
        throw InvalidArgumentError("missing \"y1\" array");
      }
      if (v["y1"].size() != n) {
        throw InvalidArgumentError("y1 length does not match dirs");
      }
      vox.y1.resize(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) {
        vox.y1[static_cast<Eigen::Index>(i)] = v["y1"][i].get<double>();
      }
      if (v.contains("y2")) {
        if (!v["y2"].is_array() || v["y2"].size() != n) {
          throw InvalidArgumentError("y2 length does not match dirs");
        }
        Eigen::VectorXd y2(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
          y2[static_cast<Eigen::Index>(i)] = v["y2"][i].get<double>();
        }
        vox.y2 = std::move(y2);
      }
    } catch (const std::exception& e) {
      vox.parse_error = e.what();
    }
    data.voxels.push_back(std::move(vox));
  }
  return data;
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgumentError("cannot write file: " + tmp.string());
    out << content;
    if (!out.good()) throw InvalidArgumentError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw InvalidArgumentError("cannot replace file: " + path);
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgumentError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace odf
