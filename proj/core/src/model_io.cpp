#include "vamp/model_io.hpp"

#include "vamp/errors.hpp"

#include <json.hpp>

#include <fstream>

namespace vamp {

namespace {

using nlohmann::json;

json to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
    if (!rows.is_array()) throw data_error("model file: expected an array of rows");
    const auto r = static_cast<Eigen::Index>(rows.size());
    if (r == 0) return {};
    const auto c = static_cast<Eigen::Index>(rows.front().size());
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(row.size()) != c) {
            throw data_error("model file: ragged matrix");
        }
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
    return m;
}

json to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = arr[static_cast<std::size_t>(i)].get<double>();
    return v;
}

json basis_to_json(const BasisSpec& spec) {
    json j;
    j["kind"] = spec.kind == BasisKind::IndicatorGrid ? "indicator-grid" : "normalized-rbf";
    j["domain_bounds"] = to_json(Eigen::MatrixXd(spec.domain_bounds));
    if (spec.kind == BasisKind::IndicatorGrid) {
        j["bins_per_dim"] = spec.bins_per_dim;
    } else {
        j["centers"] = to_json(spec.centers);
        j["w"] = spec.w;
    }
    return j;
}

BasisSpec basis_from_json(const json& j) {
    BasisSpec spec;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "indicator-grid") {
        spec.kind = BasisKind::IndicatorGrid;
        spec.bins_per_dim = j.at("bins_per_dim").get<std::vector<Eigen::Index>>();
    } else if (kind == "normalized-rbf") {
        spec.kind = BasisKind::NormalizedRbf;
        spec.centers = matrix_from_json(j.at("centers"));
        spec.w = j.at("w").get<double>();
    } else {
        throw data_error("model file: unknown basis kind '" + kind + "'");
    }
    spec.domain_bounds = matrix_from_json(j.at("domain_bounds"));
    spec.validate();
    return spec;
}

} // namespace

std::string model_to_string(const KoopmanModel& model) {
    json j;
    j["format_version"] = 1;
    j["lag_steps"] = model.lag_steps;
    j["k"] = model.rank();
    j["singular_values"] = to_json(model.singular_values);
    j["U"] = to_json(model.u);
    j["V"] = to_json(model.v);
    j["basis0"] = basis_to_json(model.basis0);
    j["basis1"] = basis_to_json(model.basis1);
    if (model.decorrelation) {
        json d;
        d["mean0"] = to_json(model.decorrelation->mean0);
        d["mean1"] = to_json(model.decorrelation->mean1);
        d["proj0"] = to_json(model.decorrelation->proj0);
        d["proj1"] = to_json(model.decorrelation->proj1);
        d["eps0"] = model.decorrelation->eps0;
        j["decorrelation"] = std::move(d);
    }
    return j.dump(1);
}

KoopmanModel model_from_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw data_error(std::string("model file parse error: ") + e.what());
    }
    try {
        const int version = j.at("format_version").get<int>();
        if (version != 1) {
            throw data_error("unsupported model format_version " + std::to_string(version));
        }
        KoopmanModel model;
        model.lag_steps = j.at("lag_steps").get<Eigen::Index>();
        model.singular_values = vector_from_json(j.at("singular_values"));
        model.u = matrix_from_json(j.at("U"));
        model.v = matrix_from_json(j.at("V"));
        model.basis0 = basis_from_json(j.at("basis0"));
        model.basis1 = basis_from_json(j.at("basis1"));
        if (j.contains("decorrelation")) {
            const auto& d = j.at("decorrelation");
            auto rec = std::make_shared<DecorrelationRecord>();
            rec->mean0 = vector_from_json(d.at("mean0"));
            rec->mean1 = vector_from_json(d.at("mean1"));
            rec->proj0 = matrix_from_json(d.at("proj0"));
            rec->proj1 = matrix_from_json(d.at("proj1"));
            rec->eps0 = d.at("eps0").get<double>();
            model.decorrelation = std::move(rec);
        }
        if (model.singular_values.size() != j.at("k").get<Eigen::Index>()) {
            throw data_error("model file: k does not match singular value count");
        }
        if (model.u.cols() != model.rank() || model.v.cols() != model.rank()) {
            throw data_error("model file: U/V column count does not match k");
        }
        return model;
    } catch (const json::exception& e) {
        throw data_error(std::string("model file field error: ") + e.what());
    }
}

void save_model(const std::filesystem::path& file, const KoopmanModel& model) {
    std::ofstream out(file);
    if (!out) throw data_error("cannot write model file: " + file.string());
    out << model_to_string(model) << '\n';
    if (!out) throw data_error("write failed: " + file.string());
}

KoopmanModel load_model(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw data_error("cannot open model file: " + file.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return model_from_string(text);
}

} // namespace vamp
