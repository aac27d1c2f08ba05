#include "dpotts/cli/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "dpotts/errors.hpp"

namespace dpotts::cli {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> trace_columns(int q) {
  std::vector<std::string> cols{"sweep", "N"};
  for (int s = 1; s <= q; ++s) cols.push_back("N_delta_" + std::to_string(s));
  cols.insert(cols.end(), {"order_param", "energy", "K"});
  return cols;
}

void write_trace_csv(std::ostream& out, const sampler::ObservableTrace& trace, int q) {
  const auto cols = trace_columns(q);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : trace.rows) {
    out << r.sweep << ',' << r.N;
    for (auto n : r.n_delta) out << ',' << n;
    out << ',' << format_number(r.order_param) << ',' << format_number(r.energy) << ',' << r.K
        << '\n';
  }
}

GridSummary summarize(std::span<const sampler::ObservableTrace> traces, int q) {
  GridSummary g;
  g.chains = traces.size();
  std::vector<double> op_means, lc_means, all_op, all_lc;
  double points = 0.0;
  std::size_t rows = 0;
  for (const auto& t : traces) {
    double op = 0.0, lc = 0.0;
    for (const auto& r : t.rows) {
      const double v = r.order_param / (q - 1);
      op += v;
      lc += r.largest_cluster;
      all_op.push_back(v);
      all_lc.push_back(r.largest_cluster);
      points += static_cast<double>(r.N);
    }
    rows += t.rows.size();
    if (!t.rows.empty()) {
      op_means.push_back(op / static_cast<double>(t.rows.size()));
      lc_means.push_back(lc / static_cast<double>(t.rows.size()));
    }
  }
  if (op_means.size() >= 2) {
    g.order_param = stats::independent(op_means);
    g.largest_cluster = stats::independent(lc_means);
    g.order_param.samples = g.largest_cluster.samples = rows;
  } else {
    g.order_param = stats::batch_means(all_op);
    g.largest_cluster = stats::batch_means(all_lc);
  }
  g.mean_points = rows ? points / static_cast<double>(rows) : 0.0;
  return g;
}

void write_summary_csv(std::ostream& out, std::span<const GridSummary> rows) {
  out << "z_index,beta_index,z,beta,chains,samples,order_param_mean,order_param_stderr,"
         "largest_cluster_mean,largest_cluster_stderr,mean_N\n";
  for (const auto& r : rows) {
    out << r.z_index << ',' << r.beta_index << ',' << format_number(r.z) << ','
        << format_number(r.beta) << ',' << r.chains << ',' << r.order_param.samples << ','
        << format_number(r.order_param.mean) << ',' << format_number(r.order_param.standard_error)
        << ',' << format_number(r.largest_cluster.mean) << ','
        << format_number(r.largest_cluster.standard_error) << ',' << format_number(r.mean_points)
        << '\n';
  }
}

std::string order_parameter_svg(std::span<const GridSummary> rows) {
  const double W = 640, H = 420, L = 70, R = 150, T = 30, B = 60;
  std::vector<const GridSummary*> finite;
  for (const auto& r : rows) {
    if (std::isfinite(r.beta) && std::isfinite(r.order_param.mean)) finite.push_back(&r);
  }
  double bmin = 0.0, bmax = 1.0, ymin = -0.1, ymax = 1.0;
  if (!finite.empty()) {
    bmin = bmax = finite.front()->beta;
    for (auto* r : finite) {
      bmin = std::min(bmin, r->beta);
      bmax = std::max(bmax, r->beta);
      const double e = std::isfinite(r->order_param.standard_error) ? r->order_param.standard_error : 0.0;
      ymin = std::min(ymin, r->order_param.mean - e);
      ymax = std::max(ymax, r->order_param.mean + e);
    }
    if (bmax == bmin) bmax = bmin + 1.0;
  }
  auto X = [&](double b) { return L + (b - bmin) / (bmax - bmin) * (W - L - R); };
  auto Y = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return std::string(buf);
  };
  static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double b = bmin + (bmax - bmin) * i / 4.0, y = ymin + (ymax - ymin) * i / 4.0;
    s << "<text x=\"" << X(b) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << num(b) << "</text>\n";
    s << "<text x=\"" << L - 6 << "\" y=\"" << Y(y) + 4 << "\" text-anchor=\"end\">" << num(y) << "</text>\n";
  }
  if (ymin < 0.0 && ymax > 0.0) {
    s << "<line x1=\"" << L << "\" y1=\"" << Y(0) << "\" x2=\"" << W - R << "\" y2=\"" << Y(0)
      << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  }
  s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">beta</text>\n";
  s << "<text transform=\"translate(18," << (T + H - B) / 2
    << ") rotate(-90)\" text-anchor=\"middle\">order parameter</text>\n";

  std::map<std::size_t, std::vector<const GridSummary*>> by_z;
  for (auto* r : finite) by_z[r->z_index].push_back(r);
  std::size_t line = 0;
  for (auto& [iz, pts] : by_z) {
    std::sort(pts.begin(), pts.end(), [](auto* a, auto* b) { return a->beta < b->beta; });
    const char* c = colours[line % 6];
    s << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\" points=\"";
    for (auto* r : pts) s << X(r->beta) << ',' << Y(r->order_param.mean) << ' ';
    s << "\"/>\n";
    for (auto* r : pts) {
      s << "<circle cx=\"" << X(r->beta) << "\" cy=\"" << Y(r->order_param.mean) << "\" r=\"3\" fill=\"" << c << "\"/>\n";
      const double e = r->order_param.standard_error;
      if (std::isfinite(e) && e > 0.0) {
        s << "<line x1=\"" << X(r->beta) << "\" y1=\"" << Y(r->order_param.mean - e) << "\" x2=\""
          << X(r->beta) << "\" y2=\"" << Y(r->order_param.mean + e) << "\" stroke=\"" << c << "\"/>\n";
      }
    }
    s << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 16 * (line + 1) << "\" fill=\"" << c
      << "\">z = " << num(pts.front()->z) << "</text>\n";
    ++line;
  }
  s << "</svg>\n";
  return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  f.close();
  if (!f) throw IoError("failed writing " + path.string());
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string());
  }
}

}  // namespace dpotts::cli
