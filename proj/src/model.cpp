#include "anfis/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "anfis/errors.hpp"

namespace anfis {

namespace {

constexpr double kSumGuard = 1e-12;
constexpr const char* kFormatTag = "anfis-model";
constexpr int kFormatVersion = 1;

void check_input_dim(const AnfisModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.num_inputs())
        throw ShapeError("input vector length " + std::to_string(x.size()) +
                         " != model inputs " +
                         std::to_string(model.num_inputs()));
}

// Membership degrees per input, mu[j][m].
std::vector<std::vector<double>> membership_table(const AnfisModel& model,
                                                  const Eigen::VectorXd& x) {
    std::vector<std::vector<double>> mu(model.inputs.size());
    for (std::size_t j = 0; j < model.inputs.size(); ++j) {
        mu[j].reserve(model.inputs[j].mfs.size());
        for (const auto& mf : model.inputs[j].mfs)
            mu[j].push_back(eval_mf(mf, x(static_cast<Eigen::Index>(j))));
    }
    return mu;
}

} // namespace

int AnfisModel::rule_count() const {
    int r = 1;
    for (const auto& v : inputs) r *= static_cast<int>(v.mfs.size());
    return r;
}

std::vector<int> AnfisModel::rule_mf_indices(int rule) const {
    std::vector<int> idx(inputs.size());
    int rem = rule;
    for (int j = static_cast<int>(inputs.size()) - 1; j >= 0; --j) {
        const int count = static_cast<int>(inputs[j].mfs.size());
        idx[j] = rem % count;
        rem /= count;
    }
    return idx;
}

int AnfisModel::premise_param_count() const {
    int count = 0;
    for (const auto& v : inputs)
        for (const auto& mf : v.mfs) count += static_cast<int>(mf.params.size());
    return count;
}

Eigen::VectorXd AnfisModel::premise_params() const {
    Eigen::VectorXd theta(premise_param_count());
    Eigen::Index k = 0;
    for (const auto& v : inputs)
        for (const auto& mf : v.mfs)
            for (double p : mf.params) theta(k++) = p;
    return theta;
}

void AnfisModel::set_premise_params(const Eigen::VectorXd& theta) {
    if (theta.size() != premise_param_count())
        throw ShapeError("premise parameter vector has wrong length");
    Eigen::Index k = 0;
    for (auto& v : inputs)
        for (auto& mf : v.mfs)
            for (double& p : mf.params) p = theta(k++);
}

AnfisModel make_grid_model(const std::vector<std::string>& input_names,
                           const std::vector<std::pair<double, double>>& ranges,
                           int mfs_per_input, MfFamily family,
                           SugenoOrder order) {
    if (input_names.size() != ranges.size())
        throw ConfigError("make_grid_model: names/ranges size mismatch");
    if (input_names.empty()) throw ConfigError("make_grid_model: no inputs");
    AnfisModel model;
    model.order = order;
    for (std::size_t j = 0; j < input_names.size(); ++j) {
        FuzzyVariable var;
        var.name = input_names[j];
        var.lo = ranges[j].first;
        var.hi = ranges[j].second;
        var.mfs = init_grid(var.lo, var.hi, mfs_per_input, family);
        model.inputs.push_back(std::move(var));
    }
    model.consequents = Eigen::MatrixXd::Zero(model.rule_count(),
                                              model.num_inputs() + 1);
    return model;
}

AnfisModel make_grid_model_for(const Dataset& ds, int mfs_per_input,
                               MfFamily family, SugenoOrder order) {
    validate_dataset(ds);
    if (ds.rows() == 0) throw ConfigError("make_grid_model_for: empty dataset");
    std::vector<std::pair<double, double>> ranges;
    for (Eigen::Index c = 0; c < ds.num_inputs(); ++c) {
        const double lo = ds.inputs.col(c).minCoeff();
        const double hi = ds.inputs.col(c).maxCoeff();
        if (!(lo < hi))
            throw ConfigError("constant input column '" + ds.input_names[c] +
                              "' cannot define a range");
        ranges.emplace_back(lo, hi);
    }
    return make_grid_model(ds.input_names, ranges, mfs_per_input, family,
                           order);
}

Eigen::VectorXd firing_strengths(const AnfisModel& model,
                                 const Eigen::VectorXd& x) {
    check_input_dim(model, x);
    const auto mu = membership_table(model, x);
    const int r = model.rule_count();
    Eigen::VectorXd w(r);
    for (int i = 0; i < r; ++i) {
        const auto idx = model.rule_mf_indices(i);
        double prod = 1.0;
        for (std::size_t j = 0; j < mu.size(); ++j)
            prod *= mu[j][static_cast<std::size_t>(idx[j])];
        w(i) = prod;
    }
    return w;
}

Eigen::VectorXd normalize(const Eigen::VectorXd& w) {
    const double total = w.sum();
    if (total < kSumGuard)
        return Eigen::VectorXd::Constant(w.size(), 1.0 / w.size());
    return w / total;
}

ForwardRecord forward(const AnfisModel& model, const Eigen::VectorXd& x) {
    check_input_dim(model, x);
    ForwardRecord rec;
    rec.firing = firing_strengths(model, x);
    rec.normalized = normalize(rec.firing);
    const int r = model.rule_count();
    const int n = model.num_inputs();
    rec.rule_outputs.resize(r);
    for (int i = 0; i < r; ++i) {
        double f = model.consequents(i, n);
        if (model.order == SugenoOrder::FirstOrder)
            f += model.consequents.row(i).head(n).dot(x);
        rec.rule_outputs(i) = f;
    }
    rec.output = rec.normalized.dot(rec.rule_outputs);
    return rec;
}

int design_width(const AnfisModel& model) {
    return model.order == SugenoOrder::FirstOrder
               ? model.rule_count() * (model.num_inputs() + 1)
               : model.rule_count();
}

Eigen::VectorXd design_row(const AnfisModel& model, const Eigen::VectorXd& x) {
    check_input_dim(model, x);
    const Eigen::VectorXd wbar = normalize(firing_strengths(model, x));
    const int r = model.rule_count();
    const int n = model.num_inputs();
    Eigen::VectorXd row(design_width(model));
    if (model.order == SugenoOrder::ZeroOrder) {
        row = wbar;
        return row;
    }
    for (int i = 0; i < r; ++i) {
        row.segment(i * (n + 1), n) = wbar(i) * x;
        row(i * (n + 1) + n) = wbar(i);
    }
    return row;
}

Eigen::VectorXd flatten_consequents(const AnfisModel& model) {
    const int r = model.rule_count();
    const int n = model.num_inputs();
    if (model.order == SugenoOrder::ZeroOrder) return model.consequents.col(n);
    Eigen::VectorXd theta(r * (n + 1));
    for (int i = 0; i < r; ++i)
        theta.segment(i * (n + 1), n + 1) = model.consequents.row(i);
    return theta;
}

void set_consequents_from_solution(AnfisModel& model,
                                   const Eigen::VectorXd& theta) {
    const int r = model.rule_count();
    const int n = model.num_inputs();
    if (theta.size() != design_width(model))
        throw ShapeError("consequent solution has wrong length");
    model.consequents.setZero(r, n + 1);
    if (model.order == SugenoOrder::ZeroOrder) {
        model.consequents.col(n) = theta;
        return;
    }
    for (int i = 0; i < r; ++i)
        model.consequents.row(i) = theta.segment(i * (n + 1), n + 1);
}

Eigen::VectorXd predict_batch(const AnfisModel& model,
                              const Eigen::MatrixXd& X) {
    if (X.cols() != model.num_inputs())
        throw ShapeError("predict_batch: column count != model inputs");
    Eigen::VectorXd y(X.rows());
    for (Eigen::Index r = 0; r < X.rows(); ++r)
        y(r) = forward(model, X.row(r).transpose()).output;
    return y;
}

std::string model_to_string(const AnfisModel& model) {
    nlohmann::json doc;
    doc["format"] = kFormatTag;
    doc["version"] = kFormatVersion;
    doc["order"] = model.order == SugenoOrder::FirstOrder ? 1 : 0;
    doc["inputs"] = nlohmann::json::array();
    for (const auto& var : model.inputs) {
        nlohmann::json jv;
        jv["name"] = var.name;
        jv["range"] = {var.lo, var.hi};
        jv["mfs"] = nlohmann::json::array();
        for (const auto& mf : var.mfs)
            jv["mfs"].push_back(
                {{"family", family_name(mf.family)}, {"params", mf.params}});
        doc["inputs"].push_back(std::move(jv));
    }
    doc["consequents"] = nlohmann::json::array();
    for (Eigen::Index i = 0; i < model.consequents.rows(); ++i) {
        std::vector<double> row(model.consequents.cols());
        for (Eigen::Index c = 0; c < model.consequents.cols(); ++c)
            row[static_cast<std::size_t>(c)] = model.consequents(i, c);
        doc["consequents"].push_back(row);
    }
    return doc.dump(2);
}

AnfisModel model_from_string(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IngestError(std::string("model parse failure: ") + e.what());
    }
    if (doc.value("format", "") != kFormatTag)
        throw IngestError("not an anfis model document");
    if (doc.value("version", -1) != kFormatVersion)
        throw IngestError("unsupported model version");

    AnfisModel model;
    model.order = doc.at("order").get<int>() == 1 ? SugenoOrder::FirstOrder
                                                  : SugenoOrder::ZeroOrder;
    for (const auto& jv : doc.at("inputs")) {
        FuzzyVariable var;
        var.name = jv.at("name").get<std::string>();
        var.lo = jv.at("range").at(0).get<double>();
        var.hi = jv.at("range").at(1).get<double>();
        for (const auto& jm : jv.at("mfs")) {
            MembershipFunction mf;
            mf.family = family_from_name(jm.at("family").get<std::string>());
            mf.params = jm.at("params").get<std::vector<double>>();
            validate_mf(mf);
            var.mfs.push_back(std::move(mf));
        }
        if (var.mfs.empty()) throw IngestError("input with no MFs");
        model.inputs.push_back(std::move(var));
    }
    const auto& rows = doc.at("consequents");
    model.consequents.resize(static_cast<Eigen::Index>(rows.size()),
                             model.num_inputs() + 1);
    if (model.consequents.rows() != model.rule_count())
        throw IngestError("consequent row count != rule count");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto row = rows[i].get<std::vector<double>>();
        if (static_cast<int>(row.size()) != model.num_inputs() + 1)
            throw IngestError("consequent row has wrong width");
        for (std::size_t c = 0; c < row.size(); ++c)
            model.consequents(static_cast<Eigen::Index>(i),
                              static_cast<Eigen::Index>(c)) = row[c];
    }
    return model;
}

void save_model(const AnfisModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write model file: " + path);
    out << model_to_string(model) << '\n';
    if (!out) throw IoError("model write failed: " + path);
}

AnfisModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return model_from_string(ss.str());
}

} // namespace anfis
