#pragma once

#include <string>

#include "gftmark/watermark.hpp"

namespace gftmark {

/// Fraction of positions where the sequences differ.
double ber(const BitSequence& original, const BitSequence& recovered);

/// sum(w * w') / sqrt(sum(w^2) * sum(w'^2)) over 0/1 values. If either side
/// is all zeros: 1 when both are, else 0.
double nc(const BitSequence& original, const BitSequence& recovered);

enum class CellStatus { ok, skipped, error };

/// One (clip, attack) cell of a robustness evaluation.
struct EvalResult {
  std::string clip;
  std::string attack;
  std::string parameters;
  double ber = 0.0;
  double nc = 0.0;
  CellStatus status = CellStatus::ok;
  std::string message;  // why a cell was skipped or failed
};

}  // namespace gftmark
