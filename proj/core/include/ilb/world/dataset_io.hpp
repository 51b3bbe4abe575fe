#pragma once

#include <filesystem>

#include "ilb/world/dataset.hpp"

namespace ilb {

// Directory layout: world.json, patients.csv (q, z_1..z_d), observations.csv
// (q, t, x_1..x_d, action, reward), latents.csv (q, t, z_1..z_d).
void write_world(const std::filesystem::path& path, const WorldSpec& world);
WorldSpec read_world(const std::filesystem::path& path);

void write_dataset(const std::filesystem::path& dir, const WorldSpec& world, const GeneratedDataset& data);

ObservationalDataset read_observations(const std::filesystem::path& dir);
DatasetLatents read_latents(const std::filesystem::path& dir);  // patients.csv + latents.csv

}  // namespace ilb
