#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "opaque_inv/experiments.hpp"

namespace opaque_inv::experiments {

namespace {

constexpr const char* kHeader =
    "n,p,lambda,m,q,sigma_np,sigma_rel,sigma_rel_approx,mean_shortage,"
    "mean_wastage,mean_cost,cost_lb,cost_ub,std_error_cost";

std::string fixed6(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

void append_row(std::string& out, const ResultRow& r) {
  out += std::to_string(r.n);
  out += ',';
  out += fixed6(r.p);
  out += ',';
  out += fixed6(r.lambda);
  out += ',';
  out += std::to_string(r.m);
  out += ',';
  out += fixed6(r.q);
  for (double v : {r.sigma_np, r.sigma_rel, r.sigma_rel_approx,
                   r.mean_shortage, r.mean_wastage, r.mean_cost, r.cost_lb,
                   r.cost_ub, r.std_error_cost}) {
    out += ',';
    out += fixed6(v);
  }
}

void write_file(const std::string& content, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out << content;
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

nlohmann::json row_to_json(const ResultRow& r) {
  nlohmann::json j;
  j["n"] = r.n;
  j["p"] = r.p;
  j["lambda"] = r.lambda;
  j["m"] = r.m;
  j["q"] = r.q;
  j["sigma_np"] = r.sigma_np;
  j["sigma_rel"] = r.sigma_rel;
  j["sigma_rel_approx"] = r.sigma_rel_approx;
  j["mean_shortage"] = r.mean_shortage;
  j["mean_wastage"] = r.mean_wastage;
  j["mean_cost"] = r.mean_cost;
  j["cost_lb"] = r.cost_lb;
  j["cost_ub"] = r.cost_ub;
  j["std_error_cost"] = r.std_error_cost;
  return j;
}

}  // namespace

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out(kHeader);
  out += '\n';
  for (const ResultRow& r : rows) {
    append_row(out, r);
    out += '\n';
  }
  return out;
}

std::string to_csv(const Table2Result& table) {
  std::string out(kHeader);
  out += ",threshold_flag\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    append_row(out, table.rows[i]);
    out += ',';
    out += table.threshold_flag[i] ? '1' : '0';
    out += '\n';
  }
  return out;
}

void emit_csv(const std::vector<ResultRow>& rows,
              const std::filesystem::path& path) {
  write_file(to_csv(rows), path);
}

void emit_csv(const Table2Result& table, const std::filesystem::path& path) {
  write_file(to_csv(table), path);
}

void emit_json(const std::vector<ResultRow>& rows,
               const std::filesystem::path& path) {
  nlohmann::json array = nlohmann::json::array();
  for (const ResultRow& r : rows) array.push_back(row_to_json(r));
  write_file(array.dump(2) + "\n", path);
}

void emit_json(const Table2Result& table, const std::filesystem::path& path) {
  nlohmann::json array = nlohmann::json::array();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    nlohmann::json j = row_to_json(table.rows[i]);
    j["threshold_flag"] = table.threshold_flag[i] ? 1 : 0;
    array.push_back(j);
  }
  write_file(array.dump(2) + "\n", path);
}

}  // namespace opaque_inv::experiments
