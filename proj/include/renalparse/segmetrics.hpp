#pragma once
// Evaluation metrics: DSC plus surface-based Hausdorff and average
// Hausdorff distances in mm under anisotropic spacing. Degenerate cases
// follow fixed conventions: both masks empty gives DSC 1 and zero
// distances; exactly one empty gives DSC 0 and undefined distances.

#include <optional>
#include <string>
#include <vector>

#include "renalparse/fuse.hpp"
#include "renalparse/grid.hpp"

namespace renalparse {

double dsc(const Mask3& pred, const Mask3& gt);

// Voxel centers (scaled by spacing) of foreground voxels that have at
// least one background 6-neighbor; out-of-bounds counts as background.
struct SurfaceCloud {
  std::vector<double> x, y, z;  // coordinate arrays (mm)
  std::size_t size() const { return x.size(); }
};

SurfaceCloud extract_surface(const Mask3& mask, Spacing3 spacing);

std::optional<double> hausdorff(const Mask3& pred, const Mask3& gt,
                                Spacing3 spacing);
std::optional<double> avg_hausdorff(const Mask3& pred, const Mask3& gt,
                                    Spacing3 spacing);

struct ClassMetrics {
  double dsc = 0.0;
  std::optional<double> hd;   // mm
  std::optional<double> ahd;  // mm
};

struct MetricsRecord {
  std::string case_id;
  ClassMetrics per_class[4];  // kidney, tumor, vein, artery

  const ClassMetrics& for_class(ClassId c) const {
    return per_class[std::size_t(int(c) - 1)];
  }
};

MetricsRecord evaluate_case(const std::string& case_id, const LabelMap& pred,
                            const LabelMap& gt);

struct ClassAggregate {
  double dsc_mean = 0.0;
  double hd_mean = 0.0;
  double ahd_mean = 0.0;
  int n_cases = 0;
  int n_distance_defined = 0;  // cases contributing to hd/ahd means
};

struct AggregateTable {
  ClassAggregate per_class[4];  // table order: kidney, tumor, vein, artery
  int n_records = 0;
};

AggregateTable aggregate(const std::vector<MetricsRecord>& records);

// per-case CSV: case_id,class,dsc,hd_mm,ahd_mm (undefined distances empty)
void write_metrics_csv(const std::vector<MetricsRecord>& records,
                       const std::string& path);
std::vector<MetricsRecord> read_metrics_csv(const std::string& path);

// aggregate JSON in the results-table layout (classes in table order, each
// with dsc/hd/ahd means and exclusion counts)
void write_aggregate_json(const AggregateTable& table, const std::string& path);

// fixed-width text rendering of the aggregate table
std::string format_aggregate_table(const AggregateTable& table);

}  // namespace renalparse
