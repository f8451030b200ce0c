#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "oac/trainer.hpp"

namespace oac {

inline constexpr const char* kMetricsHeader =
    "env_step,return_raw,return_smooth,shift_norm,q1_loss,q2_loss,actor_loss";

// Decimal with 6 significant digits, the format of every CSV value here.
std::string format_g6(double v);

void write_metrics_csv(std::ostream& out, const std::vector<EvalRow>& rows);
void write_metrics_csv(const std::string& path,
                       const std::vector<EvalRow>& rows);

// Strict reader: the header must match kMetricsHeader exactly.
std::vector<EvalRow> read_metrics_csv(const std::string& path);

}  // namespace oac
