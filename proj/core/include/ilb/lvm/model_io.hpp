#pragma once

#include <filesystem>
#include <vector>

#include "ilb/lvm/arms.hpp"
#include "ilb/lvm/trainer.hpp"

namespace ilb {

void write_model(const std::filesystem::path& path, const LvmModel& model);  // lvm.json
LvmModel read_model(const std::filesystem::path& path);

void write_arms(const std::filesystem::path& path, const ArmEstimates& arms);  // arms.json
ArmEstimates read_arms(const std::filesystem::path& path);

// train_log.csv: epoch, stage, lr, train_loss, holdout_loss, holdout_accuracy
void write_training_log(const std::filesystem::path& path, const std::vector<EpochLog>& log);

}  // namespace ilb
