#include "commands.hpp"

#include "acceptance/criteria.hpp"
#include "ando/bcl.hpp"
#include "ando/charfn.hpp"
#include "ando/generate.hpp"
#include "ando/io.hpp"
#include "ando/lift.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

namespace cli {

using namespace ando;

namespace {

struct PairSource {
    std::string file;
    std::optional<std::uint64_t> seed;
    Index dim = 2;
    std::string family = "polynomial";
};

struct Options {
    PairSource pair, pair2;
    std::string tuple, tuple2, bcl, model_file, out;
    std::string orientation = "forward", variant = "bcl2", model = "douglas";
    Index N = 8, burn = 2, window_M = 0;
    std::string window;
    bool minimality = false, matrices = false, strict = false, quick = false;
    int points = 100, angular = 360, radial = 21;
    double accept_tol = 0;
    std::vector<std::string> require, eigs;
    std::vector<int> criteria;
};

struct Context {
    std::string command;
    json inputs = json::object();
    RunReport report;
    std::ostringstream summary;
    Tolerances tol;

    void residual(const std::string& tag, double value) { report.residuals[tag] = value; }
    // Records a residual and the criterion value <= eq_tol under the same tag.
    void bounded(const std::string& tag, double value) {
        residual(tag, value);
        report.criteria[tag] = value <= tol.eq_tol;
    }
};

// ---- input loading

Tolerances with_env(Tolerances tol) {
    if (std::getenv("ANDO_LIFT_TOL")) tol.eq_tol = Tolerances::from_env().eq_tol;
    tol.validate();
    return tol;
}

PairSpec load_pair_spec(const PairSource& src, Context& ctx, const char* key) {
    PairSpec spec;
    if (!src.file.empty()) {
        std::filesystem::path p(src.file);
        spec = pair_spec_from_json(read_json_file(p), p.parent_path());
    } else if (src.seed) {
        GeneratedPair g = generate_pair(*src.seed, src.dim, family_from_string(src.family));
        spec.T1 = g.T1;
        spec.T2 = g.T2;
    } else {
        throw Error(ErrorKind::InvalidInput, std::string("give --") + key + " FILE or --seed");
    }
    spec.tol = with_env(spec.tol);
    ctx.inputs[key] = pair_spec_to_json(spec);
    return spec;
}

CommutingContractivePair load_pair(const PairSource& src, Context& ctx, const char* key = "pair") {
    PairSpec spec = load_pair_spec(src, ctx, key);
    ctx.tol = spec.tol;
    return validate_pair(spec.T1, spec.T2, spec.tol);
}

PreAndoTuple load_tuple(const std::string& file, const CommutingContractivePair& pair, Context& ctx,
                        const char* key) {
    std::filesystem::path p(file);
    TupleSpec s = tuple_spec_from_json(read_json_file(p), p.parent_path());
    PreAndoTuple t = to_pre_ando(s, pair);
    ctx.inputs[key] = tuple_spec_to_json(t);
    return t;
}

BCLTuple load_bcl(const Options& o, Context& ctx) {
    BCLTuple t;
    if (!o.window.empty()) {
        if (o.window != "bidisk" && o.window != "diamond")
            throw Error(ErrorKind::InvalidInput, "--window must be bidisk or diamond");
        WindowTuple w = o.window == "bidisk" ? bidisk_tuple(o.window_M) : diamond_tuple(o.window_M);
        t = w.tuple;
    } else if (!o.bcl.empty()) {
        std::filesystem::path p(o.bcl);
        json j = read_json_file(p);
        if (!j.contains("P") || !j.contains("U")) throw Error(ErrorKind::InvalidInput, "BCL tuple needs P and U");
        t.P = matrix_from_json(j["P"]);
        t.U = matrix_from_json(j["U"]);
        t.F_dim = t.P.rows();
        t.W1 = j.contains("W1") ? matrix_from_json(j["W1"]) : CMatrix(0, 0);
        t.W2 = j.contains("W2") ? matrix_from_json(j["W2"]) : CMatrix(0, 0);
    } else {
        throw Error(ErrorKind::InvalidInput, "give --bcl FILE or --window bidisk|diamond");
    }
    validate_bcl(t, ctx.tol);
    ctx.inputs["bcl"] = json{{"P", matrix_to_json(t.P)},
                             {"U", matrix_to_json(t.U)},
                             {"W1", matrix_to_json(t.W1)},
                             {"W2", matrix_to_json(t.W2)}};
    return t;
}

Orientation parse_orientation(const std::string& s) {
    if (s == "forward") return Orientation::Forward;
    if (s == "adjoint") return Orientation::Adjoint;
    throw Error(ErrorKind::InvalidInput, "orientation must be forward or adjoint");
}

cd parse_complex(const std::string& s) {
    const auto colon = s.find(':');
    try {
        size_t used = 0;
        double re = std::stod(s.substr(0, colon), &used);
        if (used != s.substr(0, colon).size()) throw std::invalid_argument(s);
        double im = 0;
        if (colon != std::string::npos) {
            const std::string tail = s.substr(colon + 1);
            im = std::stod(tail, &used);
            if (used != tail.size()) throw std::invalid_argument(s);
        }
        return {re, im};
    } catch (const std::logic_error&) {
        throw Error(ErrorKind::InvalidInput, "cannot read complex number '" + s + "' (use re or re:im)");
    }
}

// ---- subcommands

void cmd_generate(const Options& o, Context& ctx) {
    PairSpec spec = load_pair_spec(o.pair, ctx, "pair");
    ctx.report.details["pair"] = pair_spec_to_json(spec);
    ctx.bounded("commute", opnorm(spec.T1 * spec.T2 - spec.T2 * spec.T1));
    ctx.bounded("contract", std::max({0.0, opnorm(spec.T1) - 1.0, opnorm(spec.T2) - 1.0}));
    if (!o.out.empty()) {
        std::ofstream f(o.out);
        if (!f) throw Error(ErrorKind::InvalidInput, "cannot write " + o.out);
        f << pair_spec_to_json(spec).dump(2) << "\n";
    }
    ctx.summary << "generated " << o.pair.family << " pair of dimension " << spec.T1.rows();
}

void cmd_validate(const Options& o, Context& ctx) {
    PairSpec spec = load_pair_spec(o.pair, ctx, "pair");
    ctx.tol = spec.tol;
    const Index n = spec.T1.rows();
    if (spec.T1.cols() != n || spec.T2.rows() != n || spec.T2.cols() != n)
        throw Error(ErrorKind::DimensionMismatch, "T1 and T2 must be square of the same size");
    ctx.bounded("commute", opnorm(spec.T1 * spec.T2 - spec.T2 * spec.T1));
    ctx.bounded("contract", std::max({0.0, opnorm(spec.T1) - 1.0, opnorm(spec.T2) - 1.0}));
    ctx.report.details["dim"] = n;
    ctx.summary << "pair of dimension " << n;
}

void cmd_qstar(const Options& o, Context& ctx) {
    auto pair = load_pair(o.pair, ctx);
    QStar q = q_star(pair.T, pair.tol);
    CMatrix Q2 = q.Q * q.Q;
    ctx.bounded("Q", opnorm(pair.T * Q2 * pair.T.adjoint() - Q2));
    ctx.report.details["rank"] = q.ranQ.dim();
    ctx.report.details["squarings"] = q.squarings;
    ctx.report.details["Q"] = matrix_to_json(q.Q);
    ctx.summary << "rank Q = " << q.ranQ.dim() << " after " << q.squarings << " squarings";
}

void cmd_candecomp(const Options& o, Context& ctx) {
    auto pair = load_pair(o.pair, ctx);
    CanonicalDecomposition c = canonical_decomposition_pair(pair);
    ctx.bounded("can-decom.reduction", c.reduction_residual);
    ctx.bounded("can-decom.unitary", c.unitary_defect);
    ctx.report.criteria["can-decom.cnu"] = c.cnu_unitary_dim == 0;
    ctx.report.details["unitary_dim"] = c.Hu.dim();
    ctx.report.details["cnu_dim"] = c.Hc.dim();
    ctx.summary << "unitary part " << c.Hu.dim() << ", c.n.u. part " << c.Hc.dim();
}

void fund_residuals(Context& ctx, const FundamentalResiduals& r) {
    ctx.bounded("FundOps.1", r.fund_ops1);
    ctx.bounded("FundOps.2", r.fund_ops2);
    ctx.bounded("FundEqns.1", r.fund_eqns1);
    ctx.bounded("FundEqns.2", r.fund_eqns2);
}

void cmd_fundamental(const Options& o, Context& ctx) {
    auto pair = load_pair(o.pair, ctx);
    FundamentalPair fp = fundamental_pair(pair);
    fund_residuals(ctx, fp.residuals);
    ctx.report.details["defect_dim"] = fp.dim();
    ctx.report.details["squarings"] = fp.squarings;
    ctx.report.details["F1"] = matrix_to_json(fp.F1);
    ctx.report.details["F2"] = matrix_to_json(fp.F2);
    ctx.summary << "fundamental pair on a " << fp.dim() << "-dimensional defect space";
}

void cmd_strongfund(const Options& o, Context& ctx) {
    auto pair = load_pair(o.pair, ctx);
    FundamentalPair fp = fundamental_pair(pair);
    StrongFundReport s = check_strong_fund(fp, pair.tol);
    ctx.residual("strong-fund.F1F2", s.f1f2);
    ctx.residual("strong-fund.F2F1", s.f2f1);
    ctx.residual("strong-fund.sum1", s.sum1);
    ctx.residual("strong-fund.sum2", s.sum2);
    ctx.report.criteria["strong-fund"] = s.holds;
    if (s.holds) {
        ProjectionUnitary pu = pu_from_fund(fp, pair.tol);
        ctx.report.details["P"] = matrix_to_json(pu.P);
        ctx.report.details["U"] = matrix_to_json(pu.U);
    }
    ctx.summary << "strong-fund " << (s.holds ? "holds" : "fails");
}

void tuple_residuals(Context& ctx, const TupleClassification& c) {
    ctx.residual("AndoTuple1", c.res_typeI);
    ctx.residual("UPcond", c.res_typeIPrime);
    ctx.residual("AndoTuple2", c.res_typeII);
    ctx.residual("AndoTuple2.strong", c.res_strongTypeII);
    ctx.residual("flip.AndoTuple2", c.res_typeIIPrime);
    ctx.residual("flip.AndoTuple2.strong", c.res_strongTypeIIPrime);
    ctx.residual("StrongMinTuple", c.res_stronglyMinimal);
    ctx.residual("special", c.res_special);
    ctx.report.details["classification"] = json{{"typeI", c.typeI},
                                                {"typeIPrime", c.typeIPrime},
                                                {"typeII", c.typeII},
                                                {"strongTypeII", c.strongTypeII},
                                                {"typeIIPrime", c.typeIIPrime},
                                                {"strongTypeIIPrime", c.strongTypeIIPrime},
                                                {"stronglyMinimal", c.stronglyMinimal},
                                                {"special", c.special}};
}

bool classification_flag(const TupleClassification& c, const std::string& name) {
    const std::map<std::string, bool> flags{{"typeI", c.typeI},
                                            {"typeIPrime", c.typeIPrime},
                                            {"typeII", c.typeII},
                                            {"strongTypeII", c.strongTypeII},
                                            {"typeIIPrime", c.typeIIPrime},
                                            {"strongTypeIIPrime", c.strongTypeIIPrime},
                                            {"stronglyMinimal", c.stronglyMinimal},
                                            {"special", c.special}};
    auto it = flags.find(name);
    if (it == flags.end()) throw Error(ErrorKind::InvalidInput, "unknown tuple class '" + name + "'");
    return it->second;
}

void cmd_special_tuple(const Options& o, Context& ctx) {
    auto pair = load_pair(o.pair, ctx);
    const Orientation orient = parse_orientation(o.orientation);
    ctx.inputs["orientation"] = o.orientation;
    PreAndoTuple t = special_tuple(pair, orient);
    TupleClassification c = classify(t, pair);
    tuple_residuals(ctx, c);
    if (orient == Orientation::Adjoint) {
        ctx.report.criteria["typeI"] = c.typeI;
    } else {
        ctx.report.criteria["strongTypeII"] = c.strongTypeII;
    }
    ctx.report.details["tuple"] = tuple_spec_to_json(t);
    ctx.report.details["F_dim"] = t.F_dim;
    ctx.summary << o.orientation << " special tuple with F of dimension " << t.F_dim;
}

void cmd_classify_tuple(const Options& o, Context& ctx) {
    auto pair = load_pair(o.pair, ctx);
    PreAndoTuple t = load_tuple(o.tuple, pair, ctx, "tuple");
    TupleClassification c = classify(t, pair);
    tuple_residuals(ctx, c);
    for (const std::string& r : o.require) ctx.report.criteria[r] = classification_flag(c, r);
    ctx.summary << "typeI " << c.typeI << ", typeII " << c.typeII << ", strongTypeII " << c.strongTypeII;
}

void cmd_regularity(const Options& o, Context& ctx) {
    auto pair = load_pair(o.pair, ctx);
    RegularityReport r = regularity(pair);
    ctx.report.criteria["RegFact.cross-check"] = r.crossCheck;
    ctx.report.details["reg12"] = r.reg12;
    ctx.report.details["reg21"] = r.reg21;
    ctx.report.details["dim_DU0"] = r.dim_DU0;
    ctx.report.details["dim_RU0"] = r.dim_RU0;
    ctx.report.details["dim_sum"] = r.dim_sum;
    ctx.report.details["intersect12"] = r.intersect12;
    ctx.report.details["intersect21"] = r.intersect21;
    ctx.summary << "regularity (" << r.reg12 << ", " << r.reg21 << ")";
}

void cmd_coincide_tuple(const Options& o, Context& ctx) {
    auto pair = load_pair(o.pair, ctx);
    PreAndoTuple a = load_tuple(o.tuple, pair, ctx, "tuple");
    PreAndoTuple b = load_tuple(o.tuple2, pair, ctx, "tuple2");
    CoincideOptions opt;
    opt.accept_tol = o.accept_tol;
    CoincideResult r = coincide(a, b, pair.tol, opt);
    ctx.residual("coincide.gram", r.gram_residual);
    ctx.residual("coincide.Lambda", r.res_lambda);
    ctx.residual("coincide.P", r.res_P);
    ctx.residual("coincide.U", r.res_U);
    ctx.report.criteria["coincide"] = r.ok();
    ctx.report.details["status"] = to_string(r.status);
    ctx.report.details["span_dim"] = r.span_dim;
    if (r.tau) ctx.report.details["tau"] = matrix_to_json(*r.tau);
    if (!r.detail.empty()) ctx.report.details["detail"] = r.detail;
    ctx.summary << "coincide: " << to_string(r.status);
}

void model_residuals(Context& ctx, const BCLModel& m) {
    ctx.bounded("BCL.isometry", std::max(isometry_defect(m.interior_cols(m.V1)), isometry_defect(m.interior_cols(m.V2))));
    ctx.bounded("BCL.commute", opnorm(m.interior_cols(m.V1 * m.V2 - m.V2 * m.V1)));
    const Index u = m.unitary_dim;
    CMatrix W = u > 0 ? CMatrix(m.V1.bottomRightCorner(u, u) * m.V2.bottomRightCorner(u, u)) : CMatrix(0, 0);
    CMatrix Mz = direct_sum(shift(m.layout.coeff_dim, m.layout.N), W);
    ctx.bounded("BCLEqn1", opnorm(m.interior_cols(m.V1 * m.V2 - Mz)));
}

void cmd_bcl_model(const Options& o, Context& ctx) {
    BCLTuple t = load_bcl(o, ctx);
    if (o.variant != "bcl1" && o.variant != "bcl2") throw Error(ErrorKind::InvalidInput, "--variant must be bcl1 or bcl2");
    ctx.inputs["variant"] = o.variant;
    ctx.inputs["N"] = o.N;
    BCLModel m = bcl_model(t, o.variant == "bcl1" ? BCLVariant::BCL1 : BCLVariant::BCL2, o.N);
    model_residuals(ctx, m);
    ctx.report.details["size"] = m.size();
    if (o.matrices) {
        ctx.report.details["V1"] = matrix_to_json(m.V1);
        ctx.report.details["V2"] = matrix_to_json(m.V2);
    }
    ctx.summary << o.variant << " model of size " << m.size();
}

void cmd_bcl_recover(const Options& o, Context& ctx) {
    BCLTuple b = load_bcl(o, ctx);
    ctx.inputs["N"] = o.N;
    BCLModel m = bcl_model(b, BCLVariant::BCL2, o.N);
    CanonicalBCL cb = canonical_bcl_from_pair(m.V1, m.V2, m.layout, m.unitary_dim, ctx.tol);
    ctx.bounded("BCL2canonical", cb.unitarity_defect);
    ctx.report.details["P"] = matrix_to_json(cb.tuple.P);
    ctx.report.details["U"] = matrix_to_json(cb.tuple.U);
    if (b.unitary_dim() == 0) {
        // Both tuples seen as adjoint-oriented tuples of (V1, V2) on the product defect space.
        PreAndoTuple a, c;
        a.F_dim = b.F_dim;
        a.P = b.P;
        a.U = b.U;
        a.Lambda = ev0_adj(identity(b.F_dim), o.N).adjoint() * cb.EV;
        a.orientation = c.orientation = Orientation::Adjoint;
        a.D_basis = c.D_basis = cb.EV;
        c.F_dim = cb.tuple.F_dim;
        c.P = cb.tuple.P;
        c.U = cb.tuple.U;
        c.Lambda = cb.Phi_adj;
        CoincideOptions opt;
        opt.accept_tol = o.accept_tol > 0 ? o.accept_tol : 1e-8;
        CoincideResult r = coincide(a, c, ctx.tol, opt);
        ctx.report.details["status"] = to_string(r.status);
        if (r.status != CoincideStatus::NotIrreducible) {
            ctx.residual("BCL2canonical.roundtrip", std::max({r.res_lambda, r.res_P, r.res_U}));
            ctx.report.criteria["roundtrip"] = r.ok();
        }
        ctx.summary << "roundtrip " << to_string(r.status);
    } else {
        ctx.summary << "recovered F of dimension " << cb.tuple.F_dim;
    }
}

void cmd_doubly(const Options& o, Context& ctx) {
    BCLTuple t = load_bcl(o, ctx);
    ctx.inputs["N"] = o.N;
    DoublyCommutingReport r = is_doubly_commuting(t, ctx.tol, std::max<Index>(o.N, 1));
    ctx.residual("DC-BCLtuple", r.pupp);
    ctx.residual("DC-BCLtuple.commutator", r.commutator);
    ctx.report.criteria["DC-BCLtuple.agree"] = r.agree;
    ctx.report.details["doubly_commuting"] = r.holds;
    ctx.summary << (r.holds ? "doubly commuting" : "not doubly commuting");
}

void lift_residuals(Context& ctx, const TruncatedLift& l, const std::string& pi_tag) {
    const LiftReport& r = l.report;
    ctx.bounded(pi_tag + ".intertwine", r.intertwine);
    ctx.residual(pi_tag + ".intertwine-tail", r.intertwine_tail);
    ctx.residual(pi_tag + ".isometry", r.pi_isometry);
    ctx.bounded("lift.isometry", r.interior_isometry);
    if (l.pair_ops && !l.pcc) {
        ctx.bounded("lift.commute", r.interior_commutator);
        ctx.bounded("Vcanonical'", r.product_residual);
    }
    ctx.report.details["size"] = l.size();
    ctx.report.details["coeff_dim"] = l.coeff_dim;
}

void cmd_schaffer_lift(const Options& o, Context& ctx) {
    auto pair = load_pair(o.pair, ctx);
    ctx.inputs["N"] = o.N;
    PreAndoTuple t = o.tuple.empty() ? special_tuple(pair, Orientation::Forward) : load_tuple(o.tuple, pair, ctx, "tuple");
    TruncatedLift l = schaffer_ando_lift(pair, t, o.N);
    verify_lift(l, pair, o.burn, o.minimality);
    lift_residuals(ctx, l, "SchafferW1");
    if (o.minimality) ctx.residual("minAndoLift", l.report.minimality);
    ctx.summary << "Schaffer Ando lift of size " << l.size();
}

void cmd_douglas_lift(const Options& o, Context& ctx) {
    auto pair = load_pair(o.pair, ctx);
    ctx.inputs["N"] = o.N;
    PreAndoTuple t = o.tuple.empty() ? special_tuple(pair, Orientation::Adjoint) : load_tuple(o.tuple, pair, ctx, "tuple");
    TruncatedLift l = douglas_ando_lift(pair, t, o.N);
    verify_lift(l, pair, o.burn, o.minimality);
    lift_residuals(ctx, l, "DougAndoMod");
    if (o.minimality) ctx.residual("Douglas-min", l.report.minimality);
    ctx.summary << "Douglas Ando lift of size " << l.size();
}

void cmd_pcc(const Options& o, Context& ctx) {
    auto pair = load_pair(o.pair, ctx);
    if (o.model != "douglas" && o.model != "schaffer") throw Error(ErrorKind::InvalidInput, "--model must be douglas or schaffer");
    ctx.inputs["N"] = o.N;
    ctx.inputs["model"] = o.model;
    TruncatedLift l = o.model == "douglas" ? pcc_douglas(pair, o.N) : pcc_schaffer(pair, o.N);
    LiftReport r = verify_lift(l, pair, o.burn, false);
    const std::string tag = o.model == "douglas" ? "Dmodel-PCC" : "Smodel-PCC";
    ctx.bounded(tag + ".contractive", r.pcc_contractive);
    ctx.bounded(tag + ".commute", r.pcc_commute_W);
    ctx.bounded(tag + ".W1", r.pcc_w1);
    ctx.bounded(tag + ".W2", r.pcc_w2);
    ctx.bounded(tag + ".isometry", r.interior_isometry);
    ctx.bounded(tag + ".intertwine", r.intertwine);
    ctx.report.details["size"] = l.size();
    ctx.summary << o.model << " pseudo-commuting contractive triple of size " << l.size();
}

void cmd_bidisk_lift(const Options& o, Context& ctx) {
    auto pair = load_pair(o.pair, ctx);
    ctx.inputs["N"] = o.N;
    TruncatedLift l = bidisk_lift(pair, o.N);
    verify_lift(l, pair, o.burn, o.minimality);
    lift_residuals(ctx, l, "bidisk-Pi");
    ctx.summary << "bidisk lift of size " << l.size();
}

void cmd_theta(const Options& o, Context& ctx) {
    auto pair = load_pair(o.pair, ctx);
    ctx.inputs["points"] = o.points;
    CharFnEvaluator th(pair.T, pair.tol);
    double worst = 0;
    for (cd z : halton_disk(o.points)) worst = std::max(worst, opnorm(th(z)));
    ctx.bounded("char-func", std::max(0.0, worst - 1.0));
    json values = json::array();
    for (const std::string& s : o.eigs) {
        cd z = parse_complex(s);
        values.push_back({{"z", {z.real(), z.imag()}}, {"theta", matrix_to_json(th(z))}});
    }
    ctx.inputs["z"] = o.eigs;
    ctx.report.details["in_dim"] = th.in_dim();
    ctx.report.details["out_dim"] = th.out_dim();
    ctx.report.details["max_norm"] = worst;
    ctx.report.details["purely_contractive"] = is_purely_contractive(pair.T, pair.tol);
    if (!values.empty()) ctx.report.details["values"] = values;
    ctx.summary << "characteristic function " << th.out_dim() << "x" << th.in_dim() << ", max norm " << worst;
}

void cmd_char_triple(const Options& o, Context& ctx) {
    auto pair = load_pair(o.pair, ctx);
    ctx.inputs["strict"] = o.strict;
    CharTriple t = char_triple(pair, o.strict);
    fund_residuals(ctx, t.G.residuals);
    ctx.bounded("DefWflats.product", t.flats.product_residual);
    ctx.bounded("DefWflats.intertwine", t.flats.intertwine_residual);
    ctx.report.details["restricted"] = t.restricted;
    ctx.report.details["G1"] = matrix_to_json(t.G.F1);
    ctx.report.details["G2"] = matrix_to_json(t.G.F2);
    ctx.report.details["W_sharp1"] = matrix_to_json(t.W_sharp1());
    ctx.report.details["W_sharp2"] = matrix_to_json(t.W_sharp2());
    ctx.summary << "characteristic triple, Ran Q of dimension " << t.flats.ranQ.dim();
}

void cmd_coincide_triple(const Options& o, Context& ctx) {
    auto a = load_pair(o.pair, ctx);
    auto b = load_pair(o.pair2, ctx, "pair2");
    ctx.inputs["points"] = o.points;
    CharCoincidence r = coincide_triple(char_triple(a), char_triple(b), halton_disk(o.points), ctx.tol);
    ctx.residual("char-triple", r.residual);
    ctx.report.criteria["coincide"] = r.ok;
    ctx.report.details["solution_dim"] = r.solution_dim;
    if (!r.stage.empty()) ctx.report.details["stage"] = r.stage;
    ctx.summary << (r.ok ? "triples coincide" : "no coincidence (" + r.stage + ")");
}

void cmd_admissible(const Options& o, Context& ctx) {
    if (o.model_file.empty()) throw Error(ErrorKind::InvalidInput, "give --model FILE");
    json j = read_json_file(o.model_file);
    if (!j.contains("G1") || !j.contains("G2")) throw Error(ErrorKind::InvalidInput, "model needs G1 and G2");
    FiniteModelTriple m;
    m.G1 = matrix_from_json(j["G1"]);
    m.G2 = matrix_from_json(j["G2"]);
    for (const json& n : j.value("nodes", json::array())) {
        if (!n.contains("w") || !n["w"].is_array() || n["w"].size() != 2 || !n.contains("S"))
            throw Error(ErrorKind::InvalidInput, "nodes need w = [re, im] and S");
        m.nodes.push_back({cd(n["w"][0].get<double>(), n["w"][1].get<double>()), matrix_from_json(n["S"])});
    }
    ctx.inputs["model"] = j;
    AdmissibilityReport r = admissibility_finite(m, ctx.tol);
    ctx.residual("admis-cond.invariance", r.invariance);
    ctx.residual("admis-cond.pencil", r.pencil);
    ctx.residual("admis-cond.contractive", r.contractive);
    ctx.report.criteria["admissible"] = r.admissible;
    ctx.summary << (r.admissible ? "admissible" : "not admissible");
}

void cmd_factor_search(const Options& o, Context& ctx) {
    std::vector<cd> eigs;
    for (const std::string& s : o.eigs) eigs.push_back(parse_complex(s));
    ctx.inputs["eigs"] = o.eigs;
    ctx.inputs["angular"] = o.angular;
    ctx.inputs["radial"] = o.radial;
    ScalarFactorization s = scalar_factorization_search(eigs, o.angular, o.radial, ctx.tol);
    double dist = 0;
    Index first = 0, second = 0;
    for (auto [g1, g2] : s.points) {
        const double d1 = std::hypot(std::abs(g1) - 1.0, std::abs(g2));
        const double d2 = std::hypot(std::abs(g1), std::abs(g2) - 1.0);
        (d1 <= d2 ? first : second)++;
        dist = std::max(dist, std::min(d1, d2));
    }
    ctx.residual("ComContrFact", dist);
    ctx.report.criteria["ComContrFact"] = !s.points.empty() && dist <= 1.0 / (o.radial - 1);
    ctx.report.details["points"] = s.points.size();
    ctx.report.details["near_first_axis"] = first;
    ctx.report.details["near_second_axis"] = second;
    ctx.report.details["grid_points"] = s.grid_points;
    ctx.summary << s.points.size() << " solutions, max distance to the circles " << dist;
}

void cmd_selftest(const Options& o, Context& ctx) {
    ctx.inputs["quick"] = o.quick;
    ctx.inputs["criteria"] = o.criteria;
    std::vector<acceptance::CriterionResult> results;
    if (o.criteria.empty()) {
        results = acceptance::run_all(o.quick);
    } else {
        for (int id : o.criteria) {
            if (id < 1 || id > acceptance::kCriteria) throw Error(ErrorKind::InvalidInput, "criterion out of range");
            results.push_back(acceptance::run_criterion(id, o.quick));
        }
    }
    json lines = json::array();
    for (const auto& r : results) {
        const std::string key = "C" + std::to_string(r.id);
        ctx.report.criteria[key] = r.pass;
        ctx.report.timings[key] = r.seconds;
        lines.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        ctx.summary << (r.pass ? "[PASS] " : "[FAIL] ") << key << " " << r.name << ": " << r.detail << "\n";
    }
    ctx.report.details["criteria"] = lines;
}

// ---- wiring

void add_pair(CLI::App* sub, PairSource& src, const std::string& name = "pair") {
    sub->add_option("--" + name, src.file, "pair spec JSON file");
    if (name == "pair") {
        sub->add_option("--seed", src.seed, "generate the pair from this seed instead of a file");
        sub->add_option("--dim", src.dim, "dimension of the generated pair")->check(CLI::Range(1, 64));
        sub->add_option("--family", src.family, "polynomial | block | unitary | nilpotent | joint-eig");
    }
}

void add_bcl(CLI::App* sub, Options& o) {
    sub->add_option("--bcl", o.bcl, "BCL tuple JSON file {P, U, W1?, W2?}");
    sub->add_option("--window", o.window, "use the bidisk or diamond window tuple instead");
    sub->add_option("--M", o.window_M, "window half-width");
}

using Handler = std::function<void(const Options&, Context&)>;

void print_error(std::ostream& out, std::ostream& err, const std::string& command, const std::string& kind,
                 const std::string& message) {
    json j;
    j["command"] = command;
    j["error"] = {{"kind", kind}, {"message", message}};
    out << j.dump(2) << "\n";
    err << "error (" << kind << "): " << message << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Commuting contraction pairs: fundamental operators, Ando tuples, lifts and characteristic functions",
                 "ando_cli"};
    app.require_subcommand(1);
    std::vector<std::pair<CLI::App*, Handler>> table;
    auto add = [&](const std::string& name, const std::string& desc, Handler h) {
        CLI::App* sub = app.add_subcommand(name, desc);
        table.push_back({sub, std::move(h)});
        return sub;
    };

    auto* s = add("generate", "seeded commuting contractive pair", cmd_generate);
    add_pair(s, o.pair);
    s->add_option("--out", o.out, "also write the pair spec to this file");
    add_pair(add("validate", "commutation and contractivity residuals", cmd_validate), o.pair);
    add_pair(add("qstar", "asymptotic operator Q of T = T1 T2", cmd_qstar), o.pair);
    add_pair(add("candecomp", "canonical decomposition into unitary and c.n.u. parts", cmd_candecomp), o.pair);
    add_pair(add("fundamental", "fundamental operators of the pair", cmd_fundamental), o.pair);
    add_pair(add("strongfund", "strong fundamental relations and the induced (P, U)", cmd_strongfund), o.pair);

    s = add("special-tuple", "canonical special pre-Ando tuple", cmd_special_tuple);
    add_pair(s, o.pair);
    s->add_option("--orientation", o.orientation, "forward | adjoint");
    s = add("classify-tuple", "Type I / Type II classification of a tuple", cmd_classify_tuple);
    add_pair(s, o.pair);
    s->add_option("--tuple", o.tuple, "tuple spec JSON file")->required();
    s->add_option("--require", o.require, "classes that must hold, e.g. typeI strongTypeII");
    add_pair(add("regularity", "regularity of the two factorizations", cmd_regularity), o.pair);
    s = add("coincide-tuple", "coincidence of two tuples of the same pair", cmd_coincide_tuple);
    add_pair(s, o.pair);
    s->add_option("--tuple", o.tuple, "first tuple spec")->required();
    s->add_option("--tuple2", o.tuple2, "second tuple spec")->required();
    s->add_option("--accept-tol", o.accept_tol, "acceptance tolerance (default eq_tol)");

    s = add("bcl-model", "BCL1 / BCL2 model operators", cmd_bcl_model);
    add_bcl(s, o);
    s->add_option("--N", o.N, "truncation degree");
    s->add_option("--variant", o.variant, "bcl1 | bcl2");
    s->add_flag("--matrices", o.matrices, "include V1, V2 in the report");
    s = add("bcl-recover", "canonical BCL tuple of a BCL2 model and the roundtrip check", cmd_bcl_recover);
    add_bcl(s, o);
    s->add_option("--N", o.N, "truncation degree");
    s->add_option("--accept-tol", o.accept_tol, "roundtrip tolerance (default 1e-8)");
    s = add("doubly", "double commutativity of a BCL tuple", cmd_doubly);
    add_bcl(s, o);
    s->add_option("--N", o.N, "truncation degree of the commutator check");

    for (auto [name, desc, h] : {std::tuple{"schaffer-lift", "Schaffer-type Ando lift", Handler(cmd_schaffer_lift)},
                                 std::tuple{"douglas-lift", "Douglas-type Ando lift", Handler(cmd_douglas_lift)},
                                 std::tuple{"bidisk-lift", "bidisk model lift", Handler(cmd_bidisk_lift)}}) {
        s = add(name, desc, h);
        add_pair(s, o.pair);
        s->add_option("--N", o.N, "truncation degree")->check(CLI::Range(1, 64));
        s->add_option("--burn", o.burn, "degrees excluded from the minimality target");
        s->add_flag("--minimality", o.minimality, "also compute the minimality defect");
        if (std::string(name) != "bidisk-lift") s->add_option("--tuple", o.tuple, "tuple spec (default: special tuple)");
    }
    s = add("pcc", "pseudo-commuting contractive triple", cmd_pcc);
    add_pair(s, o.pair);
    s->add_option("--N", o.N, "truncation degree")->check(CLI::Range(1, 64));
    s->add_option("--model", o.model, "douglas | schaffer");

    s = add("theta", "characteristic function of T = T1 T2", cmd_theta);
    add_pair(s, o.pair);
    s->add_option("--points", o.points, "number of disk sample points")->check(CLI::Range(1, 100000));
    s->add_option("--z", o.eigs, "evaluation points re[:im]");
    s = add("char-triple", "characteristic triple", cmd_char_triple);
    add_pair(s, o.pair);
    s->add_flag("--strict", o.strict, "fail when the pair has a unitary part");
    s = add("coincide-triple", "coincidence of two characteristic triples", cmd_coincide_triple);
    add_pair(s, o.pair);
    add_pair(s, o.pair2, "pair2");
    s->add_option("--points", o.points, "number of disk sample points")->check(CLI::Range(1, 100000));
    s = add("admissible", "admissibility of a finite model triple", cmd_admissible);
    s->add_option("--model", o.model_file, "model JSON {G1, G2, nodes: [{w: [re, im], S}]}")->required();
    s = add("factor-search", "scalar commuting contractive factorization search", cmd_factor_search);
    s->add_option("--eig", o.eigs, "node eigenvalue re[:im], repeatable")->required();
    s->add_option("--angular", o.angular, "angular grid size");
    s->add_option("--radial", o.radial, "radial grid size");

    s = add("selftest", "acceptance criteria", cmd_selftest);
    s->add_flag("--quick", o.quick, "reduced instance counts");
    s->add_option("--criterion", o.criteria, "run only these criteria (1-11)");

    std::string command;
    if (!args.empty() && !args.front().empty() && args.front()[0] != '-') {
        bool known = false;
        for (auto& entry : table) known |= entry.first->get_name() == args.front();
        if (!known) {
            print_error(out, err, args.front(), "UsageError", "unknown subcommand '" + args.front() + "'");
            return kInputError;
        }
    }
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        err << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return kPass;
    } catch (const CLI::ParseError& e) {
        if (!app.get_subcommands().empty()) command = app.get_subcommands().front()->get_name();
        print_error(out, err, command, "UsageError", e.what());
        return kInputError;
    }

    Context ctx;
    for (auto& [sub, handler] : table) {
        if (!sub->parsed()) continue;
        command = sub->get_name();
        ctx.command = command;
        ctx.report.command = command;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            ctx.tol = with_env(Tolerances{});
            handler(o, ctx);
        } catch (const Error& e) {
            print_error(out, err, command, std::string(to_string(e.kind())), e.what());
            return kInputError;
        } catch (const std::exception& e) {
            print_error(out, err, command, "InvalidInput", e.what());
            return kInputError;
        }
        ctx.report.timings["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        break;
    }
    ctx.report.details["eq_tol"] = ctx.tol.eq_tol;
    ctx.report.inputs_hash = fnv1a_hex(json{{"command", command}, {"inputs", ctx.inputs}}.dump());
    out << ctx.report.to_json().dump(2) << "\n";
    const bool pass = ctx.report.pass();
    std::string text = ctx.summary.str();
    if (!text.empty() && text.back() != '\n') text += '\n';
    err << command << ": " << text << (pass ? "pass" : "FAIL") << "\n";
    return pass ? kPass : kCriterionFailed;
}

}  // namespace cli
