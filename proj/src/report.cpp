#include "gerry/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <tuple>

#include "gerry/error.hpp"
#include "gerry/serialize.hpp"

namespace gerry {

ElectionRow election_row(const ResolvedElection& resolved, std::span<const double> taus) {
  const Election e(resolved.shares);
  const MetricSet m = metric_set(e, taus);
  ElectionRow row;
  row.key = resolved.key;
  row.seats = e.size();
  row.delta_tilde = m.delta_tilde;
  row.declination = m.declination;
  row.delta_n = m.delta_n;
  row.efficiency_gap = m.efficiency_gap;
  for (const double tau : taus) row.tau_gaps.emplace_back(tau, m.tau_gaps.at(tau));
  row.mean_median = m.mean_median;
  row.seat_share_p = m.seat_share_p;
  row.vote_share_p = m.vote_share_p;
  row.n_imputed = resolved.n_imputed();
  return row;
}

ElectionTable election_table(std::span<const ElectionGroup> groups, const ImputeStrategy& strategy,
                             const ModelMap& models, std::span<const double> taus,
                             std::uint64_t seed) {
  ElectionTable table;
  for (const auto& g : groups) {
    if (g.exclusion_reason) {
      table.exclusions.push_back({g.key, *g.exclusion_reason});
      continue;
    }
    try {
      const ImputationModel* model = nullptr;
      if (strategy.kind == ImputeStrategy::Kind::model) {
        const auto it = models.find(partition_of(g.key));
        if (it != models.end()) model = &it->second;
      }
      ResolvedElection resolved = resolve_group(g, strategy, model, seed);
      table.rows.push_back(election_row(resolved, taus));
      table.resolved.push_back(std::move(resolved));
    } catch (const Error& e) {
      table.errors.push_back({g.key, e.what()});
    }
  }
  return table;
}

std::optional<double> metric_value(const ElectionRow& row, Metric metric, double tau) {
  switch (metric) {
    case Metric::delta_tilde:
      return row.delta_tilde;
    case Metric::declination:
      return row.declination;
    case Metric::delta_n:
      return row.delta_n;
    case Metric::efficiency_gap:
      return row.efficiency_gap;
    case Metric::mean_median:
      return row.mean_median;
    case Metric::seats:
      return static_cast<double>(row.seats);
    case Metric::tau_gap:
      for (const auto& [t, gap] : row.tau_gaps) {
        if (t == tau) return gap;
      }
      return std::nullopt;
  }
  return std::nullopt;
}

void sort_rows(std::vector<ElectionRow>& rows, Metric metric, bool descending, double tau) {
  std::stable_sort(rows.begin(), rows.end(), [&](const ElectionRow& a, const ElectionRow& b) {
    const auto va = metric_value(a, metric, tau);
    const auto vb = metric_value(b, metric, tau);
    if (!va || !vb) return va.has_value() && !vb.has_value();
    return descending ? *va > *vb : *va < *vb;
  });
}

namespace {

bool year_state_less(const ElectionRow& a, const ElectionRow& b) {
  return std::tie(a.key.year, a.key.state) < std::tie(b.key.year, b.key.state);
}

std::string clean_negative_zero(std::string s) {
  if (s.starts_with('-') && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

void write_csv_field_list(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
  out << '\n';
}

}  // namespace

Extremes extremes(std::span<const ElectionRow> rows, std::size_t limit) {
  Extremes ex;
  for (const auto& r : rows) {
    if (!r.delta_tilde) continue;
    if (*r.delta_tilde > 0.0) ex.most_positive.push_back(r);
    if (*r.delta_tilde < 0.0) ex.most_negative.push_back(r);
  }
  std::sort(ex.most_positive.begin(), ex.most_positive.end(),
            [](const ElectionRow& a, const ElectionRow& b) {
              if (*a.delta_tilde != *b.delta_tilde) return *a.delta_tilde > *b.delta_tilde;
              return year_state_less(a, b);
            });
  std::sort(ex.most_negative.begin(), ex.most_negative.end(),
            [](const ElectionRow& a, const ElectionRow& b) {
              if (*a.delta_tilde != *b.delta_tilde) return *a.delta_tilde < *b.delta_tilde;
              return year_state_less(a, b);
            });
  if (ex.most_positive.size() > limit) ex.most_positive.resize(limit);
  if (ex.most_negative.size() > limit) ex.most_negative.resize(limit);
  return ex;
}

std::vector<CycleSummary> cycle_summary(std::span<const ElectionRow> rows) {
  std::map<std::tuple<std::string, Chamber, std::string>, CycleSummary> cycles;
  for (const auto& r : rows) {
    if (!r.delta_tilde) continue;
    auto& c = cycles[{r.key.state, r.key.chamber, r.key.cycle_id}];
    c.state = r.key.state;
    c.chamber = r.key.chamber;
    c.cycle_id = r.key.cycle_id;
    c.values.emplace_back(r.key.year, *r.delta_tilde);
  }
  std::vector<CycleSummary> out;
  out.reserve(cycles.size());
  for (auto& [key, c] : cycles) {
    std::stable_sort(c.values.begin(), c.values.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    c.n_defined = c.values.size();
    c.min = c.values.front().second;
    c.max = c.values.front().second;
    for (const auto& [year, v] : c.values) {
      c.min = std::min(c.min, v);
      c.max = std::max(c.max, v);
    }
    c.sign_persistent = c.min > 0.0 || c.max < 0.0;
    out.push_back(std::move(c));
  }
  return out;
}

std::optional<double> persistence_rate(std::span<const CycleSummary> summaries, double threshold) {
  if (!(threshold >= 0.0)) throw Error("persistence threshold must be nonnegative");
  std::size_t exceeding = 0;
  std::size_t persistent = 0;
  for (const auto& c : summaries) {
    for (const auto& [year, v] : c.values) {
      if (std::abs(v) <= threshold) continue;
      ++exceeding;
      if (c.sign_persistent) ++persistent;
    }
  }
  if (exceeding == 0) return std::nullopt;
  return static_cast<double>(persistent) / static_cast<double>(exceeding);
}

std::optional<double> metric_r_squared(std::span<const ElectionRow> rows, Metric a, Metric b,
                                       double tau_a, double tau_b) {
  std::vector<std::pair<double, double>> xy;
  for (const auto& r : rows) {
    const auto x = metric_value(r, a, tau_a);
    const auto y = metric_value(r, b, tau_b);
    if (x && y) xy.emplace_back(*x, *y);
  }
  if (xy.size() < 2) return std::nullopt;
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [x, y] : xy) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(xy.size());
  my /= static_cast<double>(xy.size());
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (const auto& [x, y] : xy) {
    sxx += (x - mx) * (x - mx);
    syy += (y - my) * (y - my);
    sxy += (x - mx) * (y - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return sxy * sxy / (sxx * syy);
}

std::string format_fixed(std::optional<double> v, int decimals) {
  if (!v) return {};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, *v);
  return clean_negative_zero(buf);
}

void write_table_csv(std::ostream& out, std::span<const ElectionRow> rows) {
  std::vector<std::string> header{"state",       "chamber", "year",    "cycle_id",
                                  "seats",       "delta_tilde", "declination", "delta_n",
                                  "efficiency_gap"};
  if (!rows.empty()) {
    for (const auto& [tau, gap] : rows.front().tau_gaps) header.push_back("gap_tau_" + format_number(tau));
  }
  for (const char* h : {"mean_median", "seat_share_p", "vote_share_p", "n_imputed"}) header.emplace_back(h);
  write_csv_field_list(out, header);

  for (const auto& r : rows) {
    std::vector<std::string> f{r.key.state,
                               std::string(to_string(r.key.chamber)),
                               std::to_string(r.key.year),
                               r.key.cycle_id,
                               std::to_string(r.seats),
                               format_fixed(r.delta_tilde, 2),
                               format_fixed(r.declination, 2),
                               format_fixed(r.delta_n, 1),
                               format_fixed(r.efficiency_gap, 3)};
    for (const auto& [tau, gap] : r.tau_gaps) f.push_back(format_fixed(gap, 3));
    f.push_back(format_fixed(r.mean_median, 3));
    f.push_back(format_fixed(r.seat_share_p, 3));
    f.push_back(format_fixed(r.vote_share_p, 3));
    f.push_back(std::to_string(r.n_imputed));
    write_csv_field_list(out, f);
  }
}

std::string table_json(std::span<const ElectionRow> rows) {
  Json arr = Json::array();
  for (const auto& r : rows) arr.push_back(r);
  return arr.dump(2);
}

void write_extremes_csv(std::ostream& out, const Extremes& ex) {
  out << "side,rank,year,state,chamber,seats,delta_tilde,declination,delta_n\n";
  const auto emit = [&](const char* side, const std::vector<ElectionRow>& rows) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      write_csv_field_list(out, {side, std::to_string(i + 1), std::to_string(r.key.year),
                                 r.key.state, std::string(to_string(r.key.chamber)),
                                 std::to_string(r.seats), format_fixed(r.delta_tilde, 2),
                                 format_fixed(r.declination, 2), format_fixed(r.delta_n, 1)});
    }
  };
  emit("positive", ex.most_positive);
  emit("negative", ex.most_negative);
}

namespace {

std::string escape_xml(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

class SvgWriter {
 public:
  explicit SvgWriter(const SvgLayout& l) : l_(l) {}

  double px(double x) const { return l_.margin + l_.width * x; }
  double py(double y) const { return l_.margin + l_.height * (1.0 - y); }

  static std::string num(double v) { return format_fixed(v, 2); }

  void line(double x1, double y1, double x2, double y2, const char* style) {
    out_ << "  <line x1=\"" << num(px(x1)) << "\" y1=\"" << num(py(y1)) << "\" x2=\""
         << num(px(x2)) << "\" y2=\"" << num(py(y2)) << "\" " << style << "/>\n";
  }

  void circle(double x, double y, double r, const char* style) {
    out_ << "  <circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"" << num(r)
         << "\" " << style << "/>\n";
  }

  void text(double x, double y, const std::string& s, const char* style) {
    out_ << "  <text x=\"" << num(px(x)) << "\" y=\"" << num(py(y)) << "\" " << style << ">"
         << escape_xml(s) << "</text>\n";
  }

  std::ostringstream& raw() { return out_; }

 private:
  SvgLayout l_;
  std::ostringstream out_;
};

}  // namespace

std::string declination_diagram(const Election& e, const std::string& title, const SvgLayout& layout) {
  const auto delta = declination(e);
  if (!delta) throw UndefinedDeclination();
  const SplitIndices sp = split(e);
  const double n = static_cast<double>(e.size());
  const double k = static_cast<double>(sp.k);
  const double kp = static_cast<double>(sp.k_prime);

  const double fx = k / (2.0 * n);
  const double fy = *sp.y_bar;
  const double gx = k / n;
  const double hx = k / n + kp / (2.0 * n);
  const double hy = *sp.z_bar;

  SvgWriter svg(layout);
  const double total_w = layout.width + 2.0 * layout.margin;
  const double total_h = layout.height + 2.0 * layout.margin;
  auto& out = svg.raw();
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << SvgWriter::num(total_w)
      << "\" height=\"" << SvgWriter::num(total_h) << "\" viewBox=\"0 0 " << SvgWriter::num(total_w)
      << " " << SvgWriter::num(total_h) << "\">\n"
      << "  <rect x=\"0\" y=\"0\" width=\"" << SvgWriter::num(total_w) << "\" height=\""
      << SvgWriter::num(total_h) << "\" fill=\"white\"/>\n";
  if (!title.empty()) svg.text(0.0, 1.0 + 12.0 / layout.height, title, "font-size=\"16\" font-family=\"sans-serif\"");

  svg.line(0.0, 0.0, 1.0, 0.0, "stroke=\"black\" stroke-width=\"1\"");
  svg.line(0.0, 0.0, 0.0, 1.0, "stroke=\"black\" stroke-width=\"1\"");
  // T to U through 1/2
  svg.line(0.0, 0.5, 1.0, 0.5, "stroke=\"gray\" stroke-width=\"1\" stroke-dasharray=\"6,4\"");

  const auto s = e.shares();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x = (static_cast<double>(i) + 1.0) / n - 1.0 / (2.0 * n);
    svg.circle(x, s[i], 4.0, s[i] > 0.5 ? "fill=\"#1f4e9c\"" : "fill=\"#c0392b\"");
  }

  svg.line(fx, fy, gx, 0.5, "stroke=\"#c0392b\" stroke-width=\"2\"");
  svg.line(gx, 0.5, hx, hy, "stroke=\"#1f4e9c\" stroke-width=\"2\"");
  svg.line(fx, fy, hx, hy, "stroke=\"gray\" stroke-width=\"1\" stroke-dasharray=\"2,3\"");
  svg.circle(fx, fy, 6.0, "fill=\"none\" stroke=\"black\" stroke-width=\"2\"");
  svg.circle(gx, 0.5, 6.0, "fill=\"black\"");
  svg.circle(hx, hy, 6.0, "fill=\"none\" stroke=\"black\" stroke-width=\"2\"");
  const char* label_style = "font-size=\"14\" font-family=\"sans-serif\"";
  svg.text(fx, fy - 0.05, "F", label_style);
  svg.text(gx, 0.5 + 0.03, "G", label_style);
  svg.text(hx, hy + 0.03, "H", label_style);
  svg.text(0.02, 0.95, "\xCE\xB4 = " + format_fixed(*delta, 2), label_style);

  out << "</svg>\n";
  return out.str();
}

}  // namespace gerry
