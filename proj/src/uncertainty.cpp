#include "cwe/uncertainty.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "cwe/random.hpp"

namespace cwe {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

Eigen::Index dimension(const UncertaintyModel& model) noexcept {
  return std::visit(overloaded{[](const UniformBox& b) { return b.lo.size(); },
                               [](const FiniteSamples& f) { return f.rows.cols(); }},
                    model);
}

std::vector<std::string> check_model(const UncertaintyModel& model) {
  std::vector<std::string> problems;
  std::visit(overloaded{[&](const UniformBox& b) {
                          if (b.lo.size() != b.hi.size()) {
                            problems.push_back("uniform_box: lo and hi have different lengths");
                            return;
                          }
                          for (Eigen::Index j = 0; j < b.lo.size(); ++j) {
                            if (!std::isfinite(b.lo[j]) || !std::isfinite(b.hi[j]))
                              problems.push_back("uniform_box: coordinate " + std::to_string(j) +
                                                 " has a non-finite bound");
                            else if (b.lo[j] > b.hi[j])
                              problems.push_back("uniform_box: lo > hi at coordinate " +
                                                 std::to_string(j));
                          }
                        },
                        [&](const FiniteSamples& f) {
                          if (f.rows.rows() < 1) problems.push_back("finite_samples: no rows");
                          if (!f.rows.allFinite())
                            problems.push_back("finite_samples: non-finite entry");
                        }},
             model);
  return problems;
}

SampleSet sample(const UncertaintyModel& model, Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample: sample count must be >= 1");
  if (auto problems = check_model(model); !problems.empty()) throw DomainError(problems.front());

  SampleSet out;
  out.seed = seed;
  std::visit(overloaded{[&](const UniformBox& b) {
                          const Eigen::Index m = b.lo.size();
                          out.draws.resize(n, m);
                          for (Eigen::Index j = 0; j < m; ++j) {
                            Stream stream(seed, static_cast<std::uint64_t>(j));
                            const double lo = b.lo[j];
                            const double width = b.hi[j] - b.lo[j];
                            for (Eigen::Index i = 0; i < n; ++i) {
                              // lo + width * [0,1) can round up to hi, never past it.
                              out.draws(i, j) = std::min(lo + width * stream.next_unit(), b.hi[j]);
                            }
                          }
                        },
                        [&](const FiniteSamples& f) {
                          const Eigen::Index rows = f.rows.rows();
                          out.draws.resize(n, f.rows.cols());
                          Stream stream(seed, 0);
                          for (Eigen::Index i = 0; i < n; ++i) {
                            const auto r = static_cast<Eigen::Index>(
                                stream.next_below(static_cast<std::uint64_t>(rows)));
                            out.draws.row(i) = f.rows.row(r);
                          }
                        }},
             model);
  return out;
}

Matrix support_vertices(const UncertaintyModel& model) {
  return std::visit(
      overloaded{[](const UniformBox& b) -> Matrix {
                   const Eigen::Index m = b.lo.size();
                   if (m > kMaxVertexDimension)
                     throw UnsupportedError("support_vertices: vertex enumeration too large (m = " +
                                            std::to_string(m) + ")");
                   // Collapse degenerate coordinates so [2,2] yields a single corner.
                   std::vector<Eigen::Index> free_coords;
                   for (Eigen::Index j = 0; j < m; ++j)
                     if (b.lo[j] != b.hi[j]) free_coords.push_back(j);
                   const Eigen::Index count = Eigen::Index{1} << free_coords.size();
                   Matrix v(count, m);
                   for (Eigen::Index k = 0; k < count; ++k) {
                     v.row(k) = b.lo.transpose();
                     for (std::size_t bit = 0; bit < free_coords.size(); ++bit)
                       if ((k >> bit) & 1) v(k, free_coords[bit]) = b.hi[free_coords[bit]];
                   }
                   return v;
                 },
                 [](const FiniteSamples& f) -> Matrix { return f.rows; }},
      model);
}

bool in_support(const UncertaintyModel& model, const Eigen::Ref<const Vector>& point, double tol) {
  if (point.size() != dimension(model)) return false;
  return std::visit(overloaded{[&](const UniformBox& b) {
                                 return ((point.array() >= b.lo.array() - tol) &&
                                         (point.array() <= b.hi.array() + tol))
                                     .all();
                               },
                               [&](const FiniteSamples& f) {
                                 for (Eigen::Index r = 0; r < f.rows.rows(); ++r)
                                   if ((f.rows.row(r).transpose() - point).cwiseAbs().maxCoeff() <=
                                       tol)
                                     return true;
                                 return false;
                               }},
                    model);
}

FiniteSamples load_samples_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open sample CSV '" + path.string() + "'");

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw Error(path.string() + ":" + std::to_string(line_no) + ": not a number: '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw Error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                  std::to_string(rows.front().size()) + " columns, got " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(path.string() + ": no samples");

  FiniteSamples out;
  out.rows.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      out.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return out;
}

}  // namespace cwe
