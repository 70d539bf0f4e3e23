#include "fdrsel/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "fdrsel/error.hpp"

namespace fdrsel {

namespace {

std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

std::string scenario_fields(std::size_t index, const Scenario& s) {
  std::string out = std::to_string(index) + "," + std::to_string(s.n) + "," + std::to_string(s.p) +
                    "," + std::to_string(s.p1) + "," + format_double(s.rho) + "," +
                    format_double(s.signal_range.lo) + "," + format_double(s.signal_range.hi) +
                    "," + format_double(s.q);
  return out;
}

constexpr const char* kScenarioHeader = "scenario,n,p,p1,rho,r1,r2,q";

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view text) {
  if (text == "NA") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  const std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw InvalidParameter("'" + s + "' is not a number");
  return v;
}

Table parse_delimited(std::string_view text, char delim) {
  if (delim == 0) {
    const auto eol = text.find('\n');
    const std::string_view head = text.substr(0, eol);
    delim = (head.find('\t') != std::string_view::npos && head.find(',') == std::string_view::npos)
                ? '\t'
                : ',';
  }
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      any = true;
    } else if (c == delim) {
      record.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
      }
      record.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (in_quotes) throw InvalidParameter("unterminated quoted field");
  if (any || !field.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  if (records.empty()) throw InvalidParameter("file is empty (no header row)");

  Table t;
  t.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != t.header.size())
      throw InvalidParameter("row " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                             " fields, header has " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(records[r]));
  }
  return t;
}

Table read_delimited(const std::filesystem::path& path, char delim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidParameter("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_delimited(buf.str(), delim);
}

LoadedData to_dataset(const Table& table, std::string_view response_column) {
  std::size_t response = table.header.size();
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const std::string& name = table.header[c];
    if (name.empty()) throw InvalidParameter("header column " + std::to_string(c) + " has no name");
    for (std::size_t o = 0; o < c; ++o)
      if (table.header[o] == name)
        throw InvalidParameter("header column '" + name + "' appears more than once");
    if (name == response_column) response = c;
  }
  if (response == table.header.size())
    throw InvalidParameter("response column '" + std::string(response_column) +
                           "' not found in header");
  if (table.header.size() < 2) throw InvalidParameter("no feature columns besides the response");

  LoadedData out;
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  const auto p = static_cast<Eigen::Index>(table.header.size() - 1);
  out.data.x.resize(n, p);
  out.data.y.resize(n);
  for (std::size_t c = 0; c < table.header.size(); ++c)
    if (c != response) out.feature_names.push_back(table.header[c]);
  for (Eigen::Index r = 0; r < n; ++r) {
    Eigen::Index j = 0;
    const auto& row = table.rows[static_cast<std::size_t>(r)];
    for (std::size_t c = 0; c < row.size(); ++c) {
      double v = 0.0;
      try {
        v = parse_double(row[c]);
      } catch (const InvalidParameter&) {
        v = std::numeric_limits<double>::quiet_NaN();
      }
      if (!std::isfinite(v))
        throw InvalidParameter("column '" + table.header[c] + "', data row " + std::to_string(r + 1) +
                               ": '" + row[c] + "' is not a finite number");
      if (c == response)
        out.data.y(r) = v;
      else
        out.data.x(r, j++) = v;
    }
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidParameter("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InvalidParameter("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string replications_csv(const GridResult& result) {
  std::ostringstream o;
  o << kScenarioHeader
    << ",method,replication,n_selected,fdp,power,threshold_T,tau,null_pass_fraction,error\n";
  for (const auto& run : result.runs) {
    const std::string prefix = scenario_fields(run.index, run.scenario);
    for (std::size_t m = 0; m < result.methods.size(); ++m)
      for (const auto& s : run.by_method[m]) {
        o << prefix << ',' << to_string(s.method) << ',' << s.replication_id << ',';
        if (s.failed()) {
          o << "NA,NA,NA,NA,NA,NA," << quote(s.error) << '\n';
          continue;
        }
        o << s.n_selected << ',' << format_double(s.fdp) << ',' << opt(s.power) << ','
          << format_double(s.threshold_T) << ',' << format_double(s.tau) << ','
          << opt(s.null_pass_fraction) << ",\n";
      }
  }
  return o.str();
}

std::string summary_csv(const std::vector<ScenarioReport>& reports) {
  std::ostringstream o;
  o << kScenarioHeader
    << ",method,replications,failed,fdr,fdr_se,mean_power,fdp_min,fdp_q25,fdp_median,fdp_q75,"
       "fdp_max,power_min,power_q25,power_median,power_q75,power_max,mean_selected\n";
  for (const auto& r : reports) {
    o << scenario_fields(r.scenario_index, r.scenario) << ',' << to_string(r.method) << ',' << r.replications
      << ',' << r.failed << ',';
    if (r.replications == 0) {
      o << "NA,NA,NA,NA,NA,NA,NA,NA,NA,NA,NA,NA,NA,NA\n";
      continue;
    }
    o << format_double(r.fdr) << ',' << format_double(r.fdr_se) << ',' << opt(r.mean_power);
    for (double v : r.fdp_quantiles) o << ',' << format_double(v);
    for (std::size_t i = 0; i < 5; ++i)
      o << ',' << (r.power_quantiles ? format_double((*r.power_quantiles)[i]) : std::string("NA"));
    o << ',' << format_double(r.mean_selected) << '\n';
  }
  return o.str();
}

std::string summary_table(const std::vector<ScenarioReport>& reports) {
  std::ostringstream o;
  o << std::left << std::setw(5) << "p1" << std::setw(6) << "rho" << std::setw(12) << "signal"
    << std::setw(8) << "method" << std::right << std::setw(6) << "reps" << std::setw(8) << "failed"
    << std::setw(10) << "FDR(%)" << std::setw(10) << "SE(%)" << std::setw(11) << "power(%)"
    << std::setw(10) << "|S|" << '\n';
  for (const auto& r : reports) {
    std::ostringstream range;
    range << '(' << r.scenario.signal_range.lo << ',' << r.scenario.signal_range.hi << ')';
    std::ostringstream rho;
    rho << r.scenario.rho;
    o << std::left << std::setw(5) << r.scenario.p1 << std::setw(6) << rho.str() << std::setw(12)
      << range.str() << std::setw(8) << to_string(r.method) << std::right << std::setw(6)
      << r.replications << std::setw(8) << r.failed << std::fixed << std::setprecision(2);
    if (r.replications == 0) {
      o << std::setw(10) << "NA" << std::setw(10) << "NA" << std::setw(11) << "NA" << std::setw(10)
        << "NA";
    } else {
      o << std::setw(10) << 100.0 * r.fdr << std::setw(10) << 100.0 * r.fdr_se << std::setw(11);
      if (r.mean_power)
        o << 100.0 * *r.mean_power;
      else
        o << "NA";
      o << std::setw(10) << r.mean_selected;
    }
    o << std::defaultfloat << std::setprecision(6) << '\n';
  }
  return o.str();
}

std::string selected_csv(const SelectionOutcome& outcome, const std::vector<std::string>& names) {
  std::ostringstream o;
  switch (outcome.method) {
    case Method::Dss:
    case Method::Mss:
      o << "feature,z_tr,z_v,fi\n";
      for (std::size_t j : outcome.selected) {
        const auto i = static_cast<Eigen::Index>(j);
        o << quote(names[j]) << ',' << format_double(outcome.z_tr(i)) << ','
          << format_double(outcome.z_v(i)) << ',' << format_double(outcome.fi(i)) << '\n';
      }
      break;
    case Method::Bh:
      o << "feature,p_value\n";
      for (std::size_t j : outcome.selected)
        o << quote(names[j]) << ',' << format_double(outcome.score(static_cast<Eigen::Index>(j))) << '\n';
      break;
    case Method::Ss:
      o << "feature,selection_probability\n";
      for (std::size_t j : outcome.selected)
        o << quote(names[j]) << ',' << format_double(outcome.score(static_cast<Eigen::Index>(j))) << '\n';
      break;
  }
  return o.str();
}

}  // namespace fdrsel
