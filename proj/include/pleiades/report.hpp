#pragma once

#include <Eigen/Dense>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "pleiades/classifiers.hpp"
#include "pleiades/dataset.hpp"
#include "pleiades/eval.hpp"
#include "pleiades/profiles.hpp"
#include "pleiades/quantify.hpp"

namespace pleiades {

// ---- risk maps ----------------------------------------------------------------

struct GridAxis {
    std::string feature;
    std::optional<double> lo, hi;  // default: data range
    std::size_t points = 200;
};

struct RiskGridSpec {
    GridAxis x;
    GridAxis y;
    std::optional<std::string> slice_feature;  // one grid per value
    std::vector<double> slice_values;          // default: distinct data values
    std::vector<std::pair<std::string, double>> fixed;
};

struct RiskGrid {
    std::string x_feature, y_feature;
    std::string slice_feature;  // empty without slicing
    double slice_value = 0;
    std::vector<std::pair<std::string, double>> fixed;
    std::vector<double> x_points, y_points;
    Eigen::MatrixXd risks;  // |x_points| x |y_points|
};

// `features` supplies column layout, names and default ranges; it must be the
// matrix layout the model was trained on.
std::vector<RiskGrid> risk_map(const TrainedModel& model, const FeatureMatrix& features, const RiskGridSpec& spec,
                               int jobs = 1);
// Rows are y points, columns x points; the header row carries x coordinates.
void write_risk_grid(std::ostream& out, const RiskGrid& grid);
// x, y, slice, risk for every node of every grid.
void write_risk_long(std::ostream& out, const std::vector<RiskGrid>& grids);

// ---- table reproduction ----------------------------------------------------------

struct ReferenceTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;
    const std::string& at(std::size_t row, std::string_view name) const { return rows[row][column(name)]; }
    double number(std::size_t row, std::string_view name) const;
};
ReferenceTable load_reference(const std::string& path);

enum class TableId { T1, T2, T3, T5, T6, T12, T12a, T13a, S1, S2 };
TableId parse_table_id(std::string_view s);
std::string_view to_string(TableId t);
std::vector<TableId> all_tables();

enum class CellStatus { Pass, Fail, Info };

struct CellCheck {
    std::string key;
    std::string expected;
    std::string computed;
    double diff = 0;  // NaN for non-numeric cells
    double tolerance = 0;
    CellStatus status = CellStatus::Pass;
    std::string note;
};

struct ReproReport {
    TableId table = TableId::T1;
    std::vector<CellCheck> cells;
    std::size_t checked = 0;
    std::size_t passed = 0;
    double required_fraction = 1.0;  // pass when passed / checked reaches it
    bool pass = false;
    std::string summary;
};

struct ReproduceInputs {
    const Dataset* data = nullptr;  // quantified or raw
    const Dataset* raw = nullptr;   // raw scores for the descriptive tables
    std::string data_dir = "data";  // reference/, schema/, spaces/
    std::vector<std::string> targets;  // classifier tables; empty: the default reduced set
    TTest test = TTest::Welch;
    int jobs = 1;
    std::size_t budget = 0;
};

ReproReport reproduce(TableId table, const ReproduceInputs& in);
void write_report(std::ostream& out, const ReproReport& r);

// Reduced decision-tree space for one published feature set.
SearchSpace reduced_space(const SearchSpace& base, const std::vector<std::string>& features);

}  // namespace pleiades
