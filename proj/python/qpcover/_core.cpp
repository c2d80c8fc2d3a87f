#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qpcover/document.hpp"
#include "qpcover/errors.hpp"
#include "qpcover/grading.hpp"
#include "qpcover/grassmannian.hpp"
#include "qpcover/scattering.hpp"
#include "qpcover/surface.hpp"
#include "qpcover/truncated_algebra.hpp"

namespace py = pybind11;
using namespace qpcover;

namespace {

/// Fixture registry plus an optional parsed document; the python surface
/// works with names and plain containers, rationals rendered as strings.
class Workspace {
public:
    explicit Workspace(const std::string& document_text = "") {
        merge_documents(model_, fixture_registry());
        if (!document_text.empty()) merge_documents(model_, parse_document(document_text));
    }

    py::dict names() const {
        py::dict d;
        py::list quivers, potentials, covers, seeds;
        for (const auto& [kind, name] : model_.declaration_order) {
            if (kind == "quiver") quivers.append(name);
            if (kind == "potential") potentials.append(name);
            if (kind == "cover") covers.append(name);
            if (kind == "seed") seeds.append(name);
        }
        d["quivers"] = quivers;
        d["potentials"] = potentials;
        d["covers"] = covers;
        d["seeds"] = seeds;
        return d;
    }

    py::dict quiver_info(const std::string& name) const {
        const Quiver& q = model_.quiver(name);
        py::list vertices, arrows;
        for (const auto& v : q.vertices()) vertices.append(py::make_tuple(v.name, v.frozen));
        for (const auto& a : q.arrows())
            arrows.append(py::make_tuple(a.name, q.vertex(a.src).name, q.vertex(a.tgt).name));
        py::dict d;
        d["vertices"] = vertices;
        d["arrows"] = arrows;
        return d;
    }

    long long jacobian_dimension(const std::string& quiver, const std::string& potential,
                                 int order) const {
        const Quiver& q = model_.quiver(quiver);
        Potential w = model_.potential_for(quiver, potential);
        return TruncatedJacobianAlgebra(q, w, order).dimension();
    }

    py::object stabilization(const std::string& quiver, const std::string& potential,
                             int l_max) const {
        const Quiver& q = model_.quiver(quiver);
        Potential w = model_.potential_for(quiver, potential);
        auto l = stabilization_order(q, w, l_max);
        if (!l) return py::none();
        return py::int_(*l);
    }

    py::dict projective(const std::string& quiver, const std::string& potential, int order,
                        const std::string& vertex) const {
        const Quiver& q = model_.quiver(quiver);
        Potential w = model_.potential_for(quiver, potential);
        TruncatedJacobianAlgebra alg(q, w, order);
        auto k = q.vertex_index(vertex);
        if (!k) throw InputError("unknown vertex '" + vertex + "'");
        ProjectiveModulePresentation p = projective_presentation(alg, *k);
        SupportData s = supports(p.mod);
        py::dict d;
        py::list basis;
        for (const auto& path : p.basis) basis.append(path.str());
        d["basis"] = basis;
        py::dict dims;
        for (int v = 0; v < q.vertex_count(); ++v)
            dims[py::str(q.vertex(v).name)] = p.mod.dims[v];
        d["dims"] = dims;
        py::list sv, sa;
        for (int v : s.vertices) sv.append(q.vertex(v).name);
        for (int a : s.arrows) sa.append(q.arrow(a).name);
        d["supp_vertices"] = sv;
        d["supp_arrows"] = sa;
        return d;
    }

    py::dict euler_quot(const std::string& quiver, const std::string& potential,
                        const std::string& vertex, const std::vector<long long>& dim,
                        const std::string& method) const {
        const Quiver& q = model_.quiver(quiver);
        Potential w = model_.potential_for(quiver, potential);
        auto k = q.vertex_index(vertex);
        if (!k) throw InputError("unknown vertex '" + vertex + "'");
        EulerOptions opts;
        if (method == "loc") opts.force_method = EulerMethod::Localization;
        if (method == "ff") opts.force_method = EulerMethod::FiniteField;
        EulerResult r = euler_quot_nilp(q, w, *k, DimVec(dim.begin(), dim.end()), opts);
        return euler_dict(r);
    }

    py::dict euler_gr_at_order(const std::string& quiver, const std::string& potential, int order,
                               const std::string& vertex, const std::vector<long long>& dim,
                               const std::string& method) const {
        const Quiver& q = model_.quiver(quiver);
        Potential w = model_.potential_for(quiver, potential);
        auto k = q.vertex_index(vertex);
        if (!k) throw InputError("unknown vertex '" + vertex + "'");
        TruncatedJacobianAlgebra alg(q, w, order);
        ProjectiveModulePresentation p = projective_presentation(alg, *k);
        EulerOptions opts;
        if (method == "loc") opts.force_method = EulerMethod::Localization;
        if (method == "ff") opts.force_method = EulerMethod::FiniteField;
        EulerResult r = euler_gr(p.mod, DimVec(dim.begin(), dim.end()), opts);
        return euler_dict(r);
    }

    py::list compare_cover_euler(const std::string& cover, int max_total) const {
        const CoverEntry& e = model_.cover(cover);
        Potential wbar = base_potential(cover);
        py::list rows;
        for (const auto& fiber : e.covering->vertex_fibers()) {
            int k = fiber.front();
            ProjectionEulerReport rep = verify_projection_euler_upto(
                *e.covering, wbar, k, max_total, ProjectionMode::QuotNilp, {});
            for (const auto& row : rep.rows) {
                py::dict d;
                d["vertex"] = e.covering->total().vertex(k).name;
                d["nbar"] = dimvec_str(row.nbar);
                d["base"] = row.base_value;
                d["cover_sum"] = row.cover_sum;
                d["equal"] = row.equal;
                rows.append(d);
            }
        }
        return rows;
    }

    py::dict theta(const std::string& quiver, const std::string& potential, int order,
                   bool principal, bool use_opposite) const {
        const Quiver& q = model_.quiver(quiver);
        Potential w = model_.potential_for(quiver, potential);
        ThetaOptions opts;
        opts.principal = principal;
        opts.use_opposite = use_opposite;
        ThetaResult res = theta_stability(q, w, order, opts);
        py::dict images;
        for (int i = 0; i < q.vertex_count(); ++i) {
            py::dict coeffs;
            for (const auto& [n, c] : res.theta.image(i).terms())
                coeffs[py::str(expo_str(n))] = rat_str(c);
            images[py::str(q.vertex(i).name)] = coeffs;
        }
        return images;
    }

    py::dict theta_compare(const std::string& cover, int order, bool use_opposite) const {
        const CoverEntry& e = model_.cover(cover);
        Potential wbar = base_potential(cover);
        ThetaOptions opts;
        opts.use_opposite = use_opposite;
        CompareThetaReport rep = compare_theta_covering(*e.covering, wbar, order, opts);
        py::dict d;
        d["equal"] = rep.equal;
        d["coefficients_compared"] = rep.coefficients_compared;
        py::list rows;
        for (const auto& r : rep.rows) {
            py::dict row;
            row["base_vertex"] = e.covering->base().vertex(r.base_index).name;
            row["nbar"] = expo_str(r.nbar);
            row["cover"] = rat_str(r.cover_value);
            row["base"] = rat_str(r.base_value);
            rows.append(row);
        }
        d["discrepancies"] = rows;
        return d;
    }

    py::object nice_grading(const std::string& cover, const std::string& vertex, int order,
                            int bound) const {
        const CoverEntry& e = model_.cover(cover);
        Potential wbar = base_potential(cover);
        Potential w = sigma_potential(*e.covering, wbar);
        auto k = e.covering->total().vertex_index(vertex);
        if (!k) throw InputError("unknown vertex '" + vertex + "'");
        TruncatedJacobianAlgebra alg(e.covering->total(), w, order);
        ProjectiveModulePresentation p = projective_presentation(alg, *k);
        const SheetLabeling* lab = e.labeling ? &*e.labeling : nullptr;
        auto g = find_nice_grading(*e.covering, p, bound, lab);
        if (!g) return py::none();
        py::dict d;
        for (const auto& [v, deg] : g->vertex_degree)
            d[py::str(e.covering->total().vertex(v).name)] = deg;
        return d;
    }

    py::object nonwrap(const std::string& cover) const {
        const CoverEntry& e = model_.cover(cover);
        if (!e.labeling) throw InputError("cover '" + cover + "' has no sheet labeling");
        Potential wbar = base_potential(cover);
        Potential w = sigma_potential(*e.covering, wbar);
        auto wa = check_non_wrapping(*e.covering, *e.labeling, w, {});
        if (!wa) return py::none();
        py::dict d;
        for (const auto& [ab, deg] : wa->degree)
            d[py::str(e.covering->base().arrow(ab).name)] = deg;
        return d;
    }

    py::dict rank2(const std::string& seed_name, int order) const {
        const SeedEntry& se = model_.seed(seed_name);
        SeedPtr seed = make_seed(se.seed);
        RankTwoDiagram diag = rank2_complete(seed, initial_cluster_walls(seed, order), order);
        py::dict d;
        d["walls"] = static_cast<int>(diag.walls.size());
        d["loop_identity"] = loop_is_identity(diag);
        return d;
    }

    bool restrict_initial_walls_match(const std::string& cover, int order) const {
        const CoverEntry& e = model_.cover(cover);
        SeedCovering sc = induced_seed_covering(*e.covering);
        SeedPtr base_seed = make_seed(sc.base);
        std::vector<Wall> cover_walls;
        auto uf = sc.total.unfrozen();
        for (size_t p = 0; p < uf.size(); ++p) {
            Wall w;
            w.normal.assign(uf.size(), 0);
            w.normal[p] = 1;
            w.kind = Wall::Kind::Hyperplane;
            w.incoming = true;
            for (int m = 1; m <= order; ++m)
                w.ham[m] = sc.total.d[uf[p]] * Rat(m % 2 == 1 ? 1 : -1) / Rat(m) / Rat(m);
            cover_walls.push_back(std::move(w));
        }
        return walls_equal(base_seed, restrict_walls(sc, cover_walls, order),
                           initial_cluster_walls(base_seed, order), order);
    }

    std::string serialize() const { return serialize_document(model_); }

    bool validate_cover(const std::string& cover) const {
        return model_.cover(cover).covering->validate().ok();
    }

private:
    Potential base_potential(const std::string& cover) const {
        const CoverEntry& e = model_.cover(cover);
        std::string def = e.base_name + "-w";
        if (model_.potentials.count(def)) return model_.potential_for(e.base_name, def);
        return Potential(*e.covering->base_ptr());
    }

    static py::dict euler_dict(const EulerResult& r) {
        py::dict d;
        d["conclusive"] = r.conclusive;
        if (r.conclusive) d["chi"] = r.value;
        d["method"] = r.method == EulerMethod::Localization ? "localization" : "finite-field";
        if (!r.note.empty()) d["note"] = r.note;
        return d;
    }

    DocumentModel model_;
};

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "exact computations for coverings of quivers with potential";

    auto base_error = py::register_exception<Error>(m, "QpError");
    py::register_exception<InputError>(m, "QpInputError", base_error.ptr());
    py::register_exception<InconclusiveError>(m, "QpInconclusiveError", base_error.ptr());

    py::class_<Workspace>(m, "Workspace")
        .def(py::init<const std::string&>(), py::arg("document_text") = "")
        .def("names", &Workspace::names)
        .def("quiver_info", &Workspace::quiver_info, py::arg("name"))
        .def("jacobian_dimension", &Workspace::jacobian_dimension, py::arg("quiver"),
             py::arg("potential") = "", py::arg("order") = 1)
        .def("stabilization_order", &Workspace::stabilization, py::arg("quiver"),
             py::arg("potential") = "", py::arg("l_max") = 12)
        .def("projective", &Workspace::projective, py::arg("quiver"), py::arg("potential"),
             py::arg("order"), py::arg("vertex"))
        .def("euler_quot", &Workspace::euler_quot, py::arg("quiver"), py::arg("potential"),
             py::arg("vertex"), py::arg("dim"), py::arg("method") = "")
        .def("euler_gr", &Workspace::euler_gr_at_order, py::arg("quiver"), py::arg("potential"),
             py::arg("order"), py::arg("vertex"), py::arg("dim"), py::arg("method") = "")
        .def("compare_cover_euler", &Workspace::compare_cover_euler, py::arg("cover"),
             py::arg("max_total"))
        .def("theta_stability", &Workspace::theta, py::arg("quiver"), py::arg("potential"),
             py::arg("order"), py::arg("principal") = true, py::arg("opposite") = false)
        .def("theta_compare", &Workspace::theta_compare, py::arg("cover"), py::arg("order"),
             py::arg("opposite") = false)
        .def("nice_grading", &Workspace::nice_grading, py::arg("cover"), py::arg("vertex"),
             py::arg("order"), py::arg("bound") = 1)
        .def("nonwrap", &Workspace::nonwrap, py::arg("cover"))
        .def("rank2_complete", &Workspace::rank2, py::arg("seed"), py::arg("order"))
        .def("restrict_initial_walls_match", &Workspace::restrict_initial_walls_match,
             py::arg("cover"), py::arg("order") = 6)
        .def("validate_cover", &Workspace::validate_cover, py::arg("cover"))
        .def("serialize", &Workspace::serialize);

    m.def("fixture_names", [] { return Workspace().names(); });
}
