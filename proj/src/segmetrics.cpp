#include "renalparse/segmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "renalparse/kernels.hpp"

namespace renalparse {

double dsc(const Mask3& pred, const Mask3& gt) {
  if (pred.shape != gt.shape)
    throw std::invalid_argument("dsc: shape mismatch");
  std::size_t p = 0, g = 0, inter = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    p += pred.v[i] ? 1 : 0;
    g += gt.v[i] ? 1 : 0;
    inter += (pred.v[i] && gt.v[i]) ? 1 : 0;
  }
  if (p + g == 0) return 1.0;  // both empty
  return 2.0 * double(inter) / double(p + g);
}

SurfaceCloud extract_surface(const Mask3& mask, Spacing3 spacing) {
  const int nx = mask.shape[0], ny = mask.shape[1], nz = mask.shape[2];
  SurfaceCloud cloud;
  const auto fg = [&](int x, int y, int z) {
    if (x < 0 || y < 0 || z < 0 || x >= nx || y >= ny || z >= nz) return false;
    return mask.v[mask.index(x, y, z)] != 0;
  };
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        if (!mask.v[mask.index(x, y, z)]) continue;
        const bool boundary = !fg(x - 1, y, z) || !fg(x + 1, y, z) ||
                              !fg(x, y - 1, z) || !fg(x, y + 1, z) ||
                              !fg(x, y, z - 1) || !fg(x, y, z + 1);
        if (boundary) {
          cloud.x.push_back(double(x) * spacing[0]);
          cloud.y.push_back(double(y) * spacing[1]);
          cloud.z.push_back(double(z) * spacing[2]);
        }
      }
  return cloud;
}

namespace {

// directed max and mean surface distance from a to b
void directed_distances(const SurfaceCloud& a, const SurfaceCloud& b,
                        double& max_out, double& mean_out) {
  double mx = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d2 = kernels::min_dist_sq(a.x[i], a.y[i], a.z[i], b.x.data(),
                                           b.y.data(), b.z.data(), b.size());
    const double d = std::sqrt(d2);
    mx = std::max(mx, d);
    sum += d;
  }
  max_out = mx;
  mean_out = sum / double(a.size());
}

bool empty_mask(const Mask3& m) {
  for (const auto v : m.v)
    if (v) return false;
  return true;
}

}  // namespace

std::optional<double> hausdorff(const Mask3& pred, const Mask3& gt,
                                Spacing3 spacing) {
  if (pred.shape != gt.shape)
    throw std::invalid_argument("hausdorff: shape mismatch");
  const bool pe = empty_mask(pred), ge = empty_mask(gt);
  if (pe && ge) return 0.0;
  if (pe || ge) return std::nullopt;
  const SurfaceCloud sp = extract_surface(pred, spacing);
  const SurfaceCloud sg = extract_surface(gt, spacing);
  double mx_pg, mean_pg, mx_gp, mean_gp;
  directed_distances(sp, sg, mx_pg, mean_pg);
  directed_distances(sg, sp, mx_gp, mean_gp);
  return std::max(mx_pg, mx_gp);
}

std::optional<double> avg_hausdorff(const Mask3& pred, const Mask3& gt,
                                    Spacing3 spacing) {
  if (pred.shape != gt.shape)
    throw std::invalid_argument("avg_hausdorff: shape mismatch");
  const bool pe = empty_mask(pred), ge = empty_mask(gt);
  if (pe && ge) return 0.0;
  if (pe || ge) return std::nullopt;
  const SurfaceCloud sp = extract_surface(pred, spacing);
  const SurfaceCloud sg = extract_surface(gt, spacing);
  double mx_pg, mean_pg, mx_gp, mean_gp;
  directed_distances(sp, sg, mx_pg, mean_pg);
  directed_distances(sg, sp, mx_gp, mean_gp);
  return 0.5 * (mean_pg + mean_gp);
}

MetricsRecord evaluate_case(const std::string& case_id, const LabelMap& pred,
                            const LabelMap& gt) {
  if (pred.shape != gt.shape)
    throw std::invalid_argument("evaluate_case: shape mismatch");
  MetricsRecord rec;
  rec.case_id = case_id;
  for (const ClassId cls : kForegroundClasses) {
    const Mask3 pm = class_mask(pred, cls);
    const Mask3 gm = class_mask(gt, cls);
    auto& out = rec.per_class[std::size_t(int(cls) - 1)];
    out.dsc = dsc(pm, gm);
    out.hd = hausdorff(pm, gm, gt.spacing);
    out.ahd = avg_hausdorff(pm, gm, gt.spacing);
  }
  return rec;
}

AggregateTable aggregate(const std::vector<MetricsRecord>& records) {
  if (records.empty())
    throw std::invalid_argument("aggregate: no records");
  AggregateTable table;
  table.n_records = int(records.size());
  for (int c = 0; c < 4; ++c) {
    auto& agg = table.per_class[c];
    double hd_sum = 0.0, ahd_sum = 0.0;
    for (const auto& rec : records) {
      const auto& cm = rec.per_class[c];
      agg.dsc_mean += cm.dsc;
      ++agg.n_cases;
      if (cm.hd && cm.ahd) {
        hd_sum += *cm.hd;
        ahd_sum += *cm.ahd;
        ++agg.n_distance_defined;
      }
    }
    agg.dsc_mean /= double(agg.n_cases);
    if (agg.n_distance_defined > 0) {
      agg.hd_mean = hd_sum / agg.n_distance_defined;
      agg.ahd_mean = ahd_sum / agg.n_distance_defined;
    }
  }
  return table;
}

void write_metrics_csv(const std::vector<MetricsRecord>& records,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("metrics: cannot write " + path);
  out << "case_id,class,dsc,hd_mm,ahd_mm\n";
  char buf[64];
  const auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return std::string(buf);
  };
  for (const auto& rec : records)
    for (const ClassId cls : kForegroundClasses) {
      const auto& cm = rec.for_class(cls);
      out << rec.case_id << "," << class_name(cls) << "," << fmt(cm.dsc) << ","
          << (cm.hd ? fmt(*cm.hd) : "") << "," << (cm.ahd ? fmt(*cm.ahd) : "")
          << "\n";
    }
}

std::vector<MetricsRecord> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("metrics: cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<MetricsRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string case_id, cls, d, hd, ahd;
    std::getline(ss, case_id, ',');
    std::getline(ss, cls, ',');
    std::getline(ss, d, ',');
    std::getline(ss, hd, ',');
    std::getline(ss, ahd, ',');
    if (records.empty() || records.back().case_id != case_id) {
      records.emplace_back();
      records.back().case_id = case_id;
    }
    auto& cm =
        records.back().per_class[std::size_t(int(class_from_name(cls)) - 1)];
    cm.dsc = std::stod(d);
    if (!hd.empty()) cm.hd = std::stod(hd);
    if (!ahd.empty()) cm.ahd = std::stod(ahd);
  }
  return records;
}

void write_aggregate_json(const AggregateTable& table,
                          const std::string& path) {
  nlohmann::json j;
  j["n_cases"] = table.n_records;
  auto& classes = j["classes"] = nlohmann::json::array();
  for (const ClassId cls : kForegroundClasses) {
    const auto& agg = table.per_class[std::size_t(int(cls) - 1)];
    classes.push_back(
        {{"class", class_name(cls)},
         {"dsc_mean", agg.dsc_mean},
         {"hd_mean_mm",
          agg.n_distance_defined ? nlohmann::json(agg.hd_mean) : nullptr},
         {"ahd_mean_mm",
          agg.n_distance_defined ? nlohmann::json(agg.ahd_mean) : nullptr},
         {"n_cases", agg.n_cases},
         {"n_distance_excluded", agg.n_cases - agg.n_distance_defined}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("metrics: cannot write " + path);
  out << j.dump(2) << "\n";
}

std::string format_aggregate_table(const AggregateTable& table) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-8s %8s %10s %10s %10s\n", "class", "DSC",
                "HD[mm]", "AHD[mm]", "excluded");
  os << buf;
  for (const ClassId cls : kForegroundClasses) {
    const auto& agg = table.per_class[std::size_t(int(cls) - 1)];
    if (agg.n_distance_defined)
      std::snprintf(buf, sizeof(buf), "%-8s %8.4f %10.3f %10.3f %10d\n",
                    class_name(cls), agg.dsc_mean, agg.hd_mean, agg.ahd_mean,
                    agg.n_cases - agg.n_distance_defined);
    else
      std::snprintf(buf, sizeof(buf), "%-8s %8.4f %10s %10s %10d\n",
                    class_name(cls), agg.dsc_mean, "-", "-",
                    agg.n_cases - agg.n_distance_defined);
    os << buf;
  }
  return os.str();
}

}  // namespace renalparse
