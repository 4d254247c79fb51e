#pragma once

#include "crn/dynamics.hpp"
#include "crn/endo.hpp"
#include "crn/graph.hpp"
#include "crn/json_out.hpp"
#include "crn/kinetics.hpp"
#include "crn/netparse.hpp"

#include <string>
#include <vector>

namespace crn {

inline std::string complex_text(const ReactionNetwork& net, const Complex& c) {
    return detail::complex_text(c, net.species());
}

inline std::string reaction_text(const ReactionNetwork& net, const Reaction& r) {
    return complex_text(net, r.source) + " -> " + complex_text(net, r.target) + " [" + to_string(r.rate.exact) + "]";
}

inline Json reaction_json(const ReactionNetwork& net, const Reaction& r) {
    auto obj = [&](const Complex& c) {
        Json o = Json::object();
        for (std::size_t k = 0; k < c.dim(); ++k)
            if (c.coords[k] != 0) o[net.species()[k]] = rational_json(c.coords[k]);
        return o;
    };
    Json j;
    j["source"] = obj(r.source);
    j["target"] = obj(r.target);
    j["rate"] = r.rate.value;
    return j;
}

inline Json reactions_text_json(const ReactionNetwork& net) {
    Json a = Json::array();
    for (const auto& r : net.reactions()) a.push_back(reaction_text(net, r));
    return a;
}

inline Json partition_json(const ReactionNetwork& net, const Partition& p) {
    Json a = Json::array();
    for (const auto& b : p.blocks) {
        Json block = Json::array();
        for (auto v : b) block.push_back(complex_text(net, net.vertices()[v]));
        a.push_back(std::move(block));
    }
    return a;
}

inline Json matrix_json(const RationalMatrix& m) {
    Json a = Json::array();
    for (const auto& row : m) a.push_back(rational_vector_json(row));
    return a;
}

inline Json witness_json(const ReactionNetwork& net, const Witness& w) {
    Json j;
    j["direction"] = rational_vector_json(w.direction);
    j["reaction"] = w.reaction ? reaction_json(net, *w.reaction) : Json(nullptr);
    if (w.reaction) j["reaction_text"] = reaction_text(net, *w.reaction);
    return j;
}

inline Json verdict_json(const ReactionNetwork& net, const EndoVerdict& v) {
    Json j;
    j["status"] = to_string(v.status);
    j["method"] = v.method;
    j["witness"] = v.witness ? witness_json(net, *v.witness) : Json(nullptr);
    if (v.structure) {
        Json s;
        s["g0_empty"] = v.structure->g0_empty;
        s["gbullet_wrdz"] = v.structure->gbullet_wrdz;
        s["supports_disjoint"] = v.structure->supports_disjoint;
        s["g0_strongly_endotactic"] = v.structure->g0_strongly_endotactic;
        j["structure"] = std::move(s);
    }
    if (!v.routes.empty()) {
        Json routes = Json::array();
        for (const auto& r : v.routes) {
            Json o;
            o["route"] = r.route;
            o["certifies"] = r.status == EndoStatus::endotactic;
            o["detail"] = r.detail;
            routes.push_back(std::move(o));
        }
        j["routes"] = std::move(routes);
    }
    if (!v.all_witnesses.empty()) {
        Json all = Json::array();
        for (const auto& w : v.all_witnesses) all.push_back(witness_json(net, w));
        j["all_witnesses"] = std::move(all);
    }
    return j;
}

inline Json row_json(const Eigen::RowVectorXd& x) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < x.size(); ++i) a.push_back(x(i));
    return a;
}

inline Json flux_json(const FluxSystem& sys) {
    Json j;
    j["A"] = matrix_json(sys.A_exact);
    j["b"] = rational_vector_json(sys.b_exact);
    return j;
}

inline Json spectral_json(const SpectralReport& s) {
    Json j;
    Json ev = Json::array();
    for (const auto& z : s.eigenvalues) ev.push_back(Json{{"re", z.real()}, {"im", z.imag()}});
    j["eigenvalues"] = std::move(ev);
    j["r"] = s.spectral_abscissa;
    j["rho"] = s.rho ? Json(*s.rho) : Json(nullptr);
    j["n"] = s.n;
    j["zero_multiplicity"] = s.zero_multiplicity;
    return j;
}

inline Json equilibrium_json(const ReactionNetwork& net, const EquilibriumResult& e) {
    Json j;
    j["x_star"] = row_json(e.x_star);
    Json cls;
    cls["masses"] = e.cls.masses;
    Json comps = Json::array();
    for (const auto& c : e.cls.components) {
        Json names = Json::array();
        for (auto k : c) names.push_back(net.species()[k]);
        comps.push_back(std::move(names));
    }
    cls["components"] = std::move(comps);
    cls["full_orthant"] = e.cls.full_orthant;
    j["class"] = std::move(cls);
    j["positive"] = e.positive;
    j["residual"] = e.residual;
    j["certified"] = e.certified;
    if (e.forced) j["warning"] = "network not certified endotactic; uniqueness and positivity are not guaranteed";
    return j;
}

inline Json bound_json(const BoundReport& b) {
    Json j;
    j["rho_used"] = b.rho_used;
    j["poly_degree"] = b.poly_degree;
    j["max_degree"] = b.max_degree;
    j["fitted_coeffs"] = b.fitted_coeffs;
    j["max_ratio"] = b.max_ratio;
    j["slope"] = b.slope;
    j["trivial"] = b.trivial;
    j["pass"] = b.pass;
    return j;
}

}  // namespace crn
