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

#ifndef ODFKIT_IO_HPP
#define ODFKIT_IO_HPP

#include <string>

#include "odfkit/experiments.hpp"
#include "odfkit/fodf.hpp"
#include "odfkit/signal.hpp"

namespace odf {

// fODF document: JSON with either
//   {"atoms": [{"dir": [x, y, z], "w": w}, ...]}
// or
//   {"grid_p": p, "weights": [...]}
// Weights must sum to 1 within 1e-6 and are renormalized on load.
Fodf read_fodf(const std::string& path);
void write_fodf(const std::string& path, const Fodf& f);

// Signal table: tab-separated with header "bx by bz y", one measurement per
// row; '#' lines are metadata/comments. Model parameters live in the CLI
// flags, not the file.
struct SignalTable {
  std::vector<Direction> dirs;
  Eigen::VectorXd y;
};
SignalTable read_signal(const std::string& path);
void write_signal(const std::string& path, const std::vector<Direction>& dirs,
                  const Eigen::VectorXd& y, const std::string& meta);

// Voxel dataset: JSON {"dirs": [[x,y,z],...], "voxels": [{"id":..., "y1":
// [...], "y2": [...]?}]}. Malformed voxel entries are kept with a parse
// error note so processing can continue.
VoxelDataset read_voxel_dataset(const std::string& path);

// Writes through a temporary file plus rename so interrupted runs leave no
// partial output behind.
void atomic_write(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

}  // namespace odf

#endif  // ODFKIT_IO_HPP
