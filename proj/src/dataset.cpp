#include "gtetrad/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "gtetrad/errors.hpp"

namespace gtetrad {

namespace {

bool is_constant(const Eigen::VectorXd& v) {
    return v.maxCoeff() == v.minCoeff();
}

void format17(std::string& out, double v) {
    char buf[32];
    const int len = std::snprintf(buf, sizeof(buf), "%.17g", v);
    out.append(buf, static_cast<std::size_t>(len));
}

// RFC-4180 field splitting for one logical record set: handles quoted
// fields, doubled quotes, commas and newlines inside quotes, CRLF endings.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    const std::size_t size = text.size();
    for (std::size_t i = 0; i < size; ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < size && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty()) {
                    throw ParseError(
                        "CSV: quote inside unquoted field near row " +
                        std::to_string(rows.size() + 1));
                }
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                field_started = false;
                break;
            case '\r':
                break;
            case '\n':
                row.push_back(std::move(field));
                field.clear();
                rows.push_back(std::move(row));
                row.clear();
                field_started = false;
                break;
            default:
                field.push_back(c);
                break;
        }
    }
    if (in_quotes) throw ParseError("CSV: unterminated quoted field");
    if (!field.empty() || field_started || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

double parse_cell(const std::string& cell, std::size_t data_row,
                  const std::string& column) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    // Tolerate surrounding spaces and an explicit leading '+', which some
    // exporters emit; std::from_chars accepts neither.
    while (first < last && *first == ' ') ++first;
    while (last > first && *(last - 1) == ' ') --last;
    if (first < last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || first == last ||
        !std::isfinite(value)) {
        throw ParseError("CSV: cell at data row " + std::to_string(data_row) +
                         ", column '" + column +
                         "' is not a finite number: '" + cell + "'");
    }
    return value;
}

}  // namespace

ObservationTable::ObservationTable(
    std::array<std::string, 4> role_names,
    std::array<Eigen::VectorXd, 4> role_columns,
    std::vector<std::string> covariate_names,
    std::vector<Eigen::VectorXd> covariate_columns)
    : role_names_(std::move(role_names)),
      roles_(std::move(role_columns)),
      covariate_names_(std::move(covariate_names)),
      covariates_(std::move(covariate_columns)) {
    const Eigen::Index n = roles_[0].size();
    if (n < 1) throw ValidationError("table must have at least one row");
    if (covariate_names_.size() != covariates_.size()) {
        throw ValidationError("covariate names/columns size mismatch");
    }
    std::set<std::string> seen;
    for (int r = 0; r < 4; ++r) {
        if (!seen.insert(role_names_[r]).second) {
            throw ValidationError("role columns must be distinct; '" +
                                  role_names_[r] + "' is reused");
        }
        if (roles_[r].size() != n) {
            throw ValidationError("role column '" + role_names_[r] +
                                  "' has mismatched length");
        }
        if (!roles_[r].allFinite()) {
            throw ValidationError("role column '" + role_names_[r] +
                                  "' contains non-finite values");
        }
        if (is_constant(roles_[r])) {
            throw ValidationError("role column '" + role_names_[r] +
                                  "' is constant (zero sample variance)");
        }
    }
    for (std::size_t i = 0; i < covariates_.size(); ++i) {
        if (!seen.insert(covariate_names_[i]).second) {
            throw ValidationError("covariate column '" + covariate_names_[i] +
                                  "' duplicates another column");
        }
        if (covariates_[i].size() != n) {
            throw ValidationError("covariate column '" + covariate_names_[i] +
                                  "' has mismatched length");
        }
        if (!covariates_[i].allFinite()) {
            throw ValidationError("covariate column '" + covariate_names_[i] +
                                  "' contains non-finite values");
        }
    }
}

Eigen::MatrixXd ObservationTable::block(int role) const {
    Eigen::MatrixXd out(roles_[role].size(),
                        1 + static_cast<Eigen::Index>(covariates_.size()));
    out.col(0) = roles_[role];
    for (std::size_t i = 0; i < covariates_.size(); ++i) {
        out.col(1 + static_cast<Eigen::Index>(i)) = covariates_[i];
    }
    return out;
}

ObservationTable load_csv(const std::string& path, const RoleSpec& roles) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open input file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();
    // Strip a UTF-8 byte-order mark if present.
    if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        text.erase(0, 3);
    }
    const auto rows = parse_csv(text);
    if (rows.empty()) throw ParseError("CSV: empty file: " + path);
    const auto& header = rows.front();

    auto column_index = [&](const std::string& name) -> std::size_t {
        std::size_t found = header.size();
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) {
                if (found != header.size()) {
                    throw ConfigError("CSV header names column '" + name +
                                      "' more than once");
                }
                found = i;
            }
        }
        if (found == header.size()) {
            throw ConfigError("role refers to column '" + name +
                              "' absent from the CSV header");
        }
        return found;
    };

    const std::array<std::string, 4> role_names{roles.x, roles.y, roles.z,
                                                roles.w};
    std::array<std::size_t, 4> role_idx{};
    for (int r = 0; r < 4; ++r) role_idx[r] = column_index(role_names[r]);
    std::vector<std::size_t> cov_idx;
    cov_idx.reserve(roles.covariates.size());
    for (const auto& name : roles.covariates) {
        cov_idx.push_back(column_index(name));
    }

    const std::size_t n_rows = rows.size() - 1;
    if (n_rows == 0) throw ParseError("CSV: no data rows in " + path);
    std::array<Eigen::VectorXd, 4> role_cols;
    for (auto& col : role_cols) col.resize(static_cast<Eigen::Index>(n_rows));
    std::vector<Eigen::VectorXd> cov_cols(
        cov_idx.size(), Eigen::VectorXd(static_cast<Eigen::Index>(n_rows)));

    for (std::size_t r = 0; r < n_rows; ++r) {
        const auto& row = rows[r + 1];
        if (row.size() != header.size()) {
            throw ParseError("CSV: data row " + std::to_string(r + 1) +
                             " has " + std::to_string(row.size()) +
                             " fields, header has " +
                             std::to_string(header.size()));
        }
        for (int c = 0; c < 4; ++c) {
            role_cols[c](static_cast<Eigen::Index>(r)) =
                parse_cell(row[role_idx[c]], r + 1, role_names[c]);
        }
        for (std::size_t c = 0; c < cov_idx.size(); ++c) {
            cov_cols[c](static_cast<Eigen::Index>(r)) =
                parse_cell(row[cov_idx[c]], r + 1, roles.covariates[c]);
        }
    }
    return ObservationTable(role_names, std::move(role_cols),
                            roles.covariates, std::move(cov_cols));
}

std::string to_csv(const ObservationTable& table) {
    std::string out;
    out += table.role_name(0);
    for (int r = 1; r < 4; ++r) {
        out += ',';
        out += table.role_name(r);
    }
    for (std::size_t c = 0; c < table.n_covariates(); ++c) {
        out += ',';
        out += table.covariate_name(c);
    }
    out += '\n';
    const std::size_t n = table.n();
    for (std::size_t i = 0; i < n; ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        format17(out, table.role(0)(idx));
        for (int r = 1; r < 4; ++r) {
            out += ',';
            format17(out, table.role(r)(idx));
        }
        for (std::size_t c = 0; c < table.n_covariates(); ++c) {
            out += ',';
            format17(out, table.covariate(c)(idx));
        }
        out += '\n';
    }
    return out;
}

void write_csv(const ObservationTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << to_csv(table);
}

ObservationTable residualize(const ObservationTable& table) {
    const std::size_t v = table.n_covariates();
    if (v == 0) {
        throw ValidationError("residualize requires at least one covariate");
    }
    const auto n = static_cast<Eigen::Index>(table.n());
    if (n <= static_cast<Eigen::Index>(v) + 1) {
        throw ValidationError("residualize requires n > #covariates + 1");
    }
    Eigen::MatrixXd design(n, static_cast<Eigen::Index>(v) + 1);
    design.col(0).setOnes();
    for (std::size_t c = 0; c < v; ++c) {
        design.col(static_cast<Eigen::Index>(c) + 1) = table.covariate(c);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < design.cols()) {
        std::string names = "(intercept)";
        const auto perm = qr.colsPermutation().indices();
        for (Eigen::Index k = qr.rank(); k < design.cols(); ++k) {
            const Eigen::Index col = perm(k);
            names += ", ";
            names += (col == 0) ? "(intercept)"
                                : table.covariate_name(
                                      static_cast<std::size_t>(col - 1));
        }
        throw NumericalError(
            "residualize: covariate design is rank-deficient; collinear "
            "columns involve: " +
            names);
    }
    std::array<Eigen::VectorXd, 4> residuals;
    std::array<std::string, 4> names;
    for (int r = 0; r < 4; ++r) {
        const Eigen::VectorXd beta = qr.solve(table.role(r));
        residuals[r] = table.role(r) - design * beta;
        names[r] = table.role_name(r);
    }
    return ObservationTable(names, std::move(residuals), {}, {});
}

ObservationTable standardize(const ObservationTable& table) {
    const auto n = static_cast<double>(table.n());
    auto zscore = [n](const Eigen::VectorXd& col) {
        const double m = col.mean();
        const double sd = std::sqrt((col.array() - m).square().sum() / n);
        return Eigen::VectorXd(((col.array() - m) / sd).matrix());
    };
    std::array<Eigen::VectorXd, 4> role_cols;
    std::array<std::string, 4> names;
    for (int r = 0; r < 4; ++r) {
        role_cols[r] = zscore(table.role(r));
        names[r] = table.role_name(r);
    }
    std::vector<std::string> cov_names;
    std::vector<Eigen::VectorXd> cov_cols;
    for (std::size_t c = 0; c < table.n_covariates(); ++c) {
        cov_names.push_back(table.covariate_name(c));
        cov_cols.push_back(zscore(table.covariate(c)));
    }
    return ObservationTable(names, std::move(role_cols), std::move(cov_names),
                            std::move(cov_cols));
}

std::string RolePermutation::label() const {
    std::string out = "(";
    for (int r = 0; r < 4; ++r) {
        out += std::to_string(order[r] + 1);
        out += (r < 3) ? "," : ")";
    }
    return out;
}

std::vector<RolePermutation> enumerate_permutations() {
    std::vector<RolePermutation> perms;
    perms.reserve(12);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            if (j == i) continue;
            std::array<int, 2> rest{};
            int r = 0;
            for (int k = 0; k < 4; ++k) {
                if (k != i && k != j) rest[r++] = k;
            }
            perms.push_back(RolePermutation{{i, j, rest[0], rest[1]}});
        }
    }
    return perms;
}

ObservationTable apply_permutation(const ObservationTable& table,
                                   const RolePermutation& perm) {
    std::array<Eigen::VectorXd, 4> role_cols;
    std::array<std::string, 4> names;
    for (int r = 0; r < 4; ++r) {
        role_cols[r] = table.role(perm.order[r]);
        names[r] = table.role_name(perm.order[r]);
    }
    std::vector<std::string> cov_names;
    std::vector<Eigen::VectorXd> cov_cols;
    for (std::size_t c = 0; c < table.n_covariates(); ++c) {
        cov_names.push_back(table.covariate_name(c));
        cov_cols.push_back(table.covariate(c));
    }
    return ObservationTable(names, std::move(role_cols), std::move(cov_names),
                            std::move(cov_cols));
}

}  // namespace gtetrad
