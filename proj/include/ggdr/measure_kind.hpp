#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace ggdr {

/// The five subspace measures. All but the Binet-Cauchy kernel are
/// distance-like (smaller is closer).
enum class MeasureKind {
  ProjectionSq,
  FubiniStudy,
  BinetCauchyDistSq,
  ProjectionKernelDistSq,
  BinetCauchyKernel,
};

enum class Orientation { DistanceLike, SimilarityLike };

inline constexpr std::array<MeasureKind, 5> kAllMeasureKinds = {
    MeasureKind::ProjectionSq, MeasureKind::FubiniStudy,
    MeasureKind::BinetCauchyDistSq, MeasureKind::ProjectionKernelDistSq,
    MeasureKind::BinetCauchyKernel};

constexpr Orientation orientation(MeasureKind kind) {
  return kind == MeasureKind::BinetCauchyKernel ? Orientation::SimilarityLike
                                                : Orientation::DistanceLike;
}

/// Short CLI name: pro, fs, bc, pk, bck.
std::string_view short_name(MeasureKind kind);
std::string_view long_name(MeasureKind kind);
std::optional<MeasureKind> parse_measure_kind(std::string_view name);

}  // namespace ggdr
