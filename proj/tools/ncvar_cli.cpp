// Command-line frontend for the variational multivector kernel.

#include <CLI11.hpp>

#include <ncvar/ncvar.hpp>
#include <ncvar/testkit.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace ncvar;

struct GlobalOpts {
    int gens = 1;
    int base_dim = 1;
    bool commutative = false;
    bool json = false;

    Context context() const { return Context(gens, base_dim, commutative); }
};

std::vector<std::string> parse_slot_names(const std::string& s) {
    std::vector<std::string> slots;
    for (auto& part : ncvar::detail::split_top_level(s, ',')) {
        std::string t;
        for (char c : part)
            if (!std::isspace(static_cast<unsigned char>(c))) t += c;
        if (!t.empty()) slots.push_back(t);
    }
    return slots;
}

void emit_poly(const GlobalOpts& g, const Context& ctx, const Functional& f) {
    if (g.json)
        std::cout << serialize(ctx, f).dump() << "\n";
    else
        std::cout << render(ctx, f) << "\n";
}

Json tuple_json(const Context& ctx, const Tuple& t) {
    Json arr = Json::array();
    for (const auto& comp : t) arr.push_back(serialize(ctx, comp));
    return arr;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact calculus of noncommutative variational multivectors"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--gens", g.gens, "number of generator pairs (default 1)");
    app.add_option("--base-dim", g.base_dim, "number of base coordinates (default 1)");
    app.add_flag("--commutative", g.commutative, "graded-commutative mode");
    app.add_flag("--json", g.json, "structured JSON output");

    // euler
    auto* euler = app.add_subcommand("euler", "variational derivative of a tr(...) density");
    std::string euler_expr, euler_var = "a", euler_side = "right";
    euler->add_option("expr", euler_expr, "density, e.g. \"tr(a*a*a)\"")->required();
    euler->add_option("--var", euler_var, "family: a or b (default a)");
    euler->add_option("--side", euler_side, "slot side: right or left (default right)");

    // adjoint
    auto* adj = app.add_subcommand("adjoint", "formal adjoint of a linear operator");
    std::string adj_op, adj_slots = "p";
    adj->add_option("--op", adj_op, "operator entry, e.g. \"D[1](p)\"")->required();
    adj->add_option("--slots", adj_slots, "comma-separated slot names (default p)");

    // couple
    auto* cpl = app.add_subcommand("couple", "pairing of a covector with a velocity");
    std::string cpl_p, cpl_phi;
    cpl->add_option("--p", cpl_p, "covector tuple (';'-separated components)")->required();
    cpl->add_option("--phi", cpl_phi, "velocity tuple")->required();

    // schouten
    auto* sch = app.add_subcommand("schouten", "variational Schouten bracket of two densities");
    std::string sch_a, sch_b;
    sch->add_option("xi", sch_a, "first density")->required();
    sch->add_option("eta", sch_b, "second density")->required();

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "value of a multivector on covectors");
    std::string ev_expr;
    std::vector<std::string> ev_ps;
    ev->add_option("xi", ev_expr, "multivector density")->required();
    ev->add_option("--p", ev_ps, "covector tuple (repeat per argument)");

    // q-field
    auto* qf = app.add_subcommand("q-field", "odd evolutionary field of a multivector");
    std::string qf_expr;
    qf->add_option("xi", qf_expr, "multivector density")->required();

    // poisson
    auto* poi = app.add_subcommand("poisson", "Poisson bracket of two Hamiltonians");
    std::string poi_h1, poi_h2, poi_op, poi_slots = "p";
    poi->add_option("h1", poi_h1, "first Hamiltonian")->required();
    poi->add_option("h2", poi_h2, "second Hamiltonian")->required();
    poi->add_option("--op", poi_op, "skew-adjoint operator")->required();
    poi->add_option("--slots", poi_slots, "slot names (default p)");

    // jacobiator
    auto* jac = app.add_subcommand("jacobiator", "cyclic Jacobi obstruction of three Hamiltonians");
    std::string jac_h1, jac_h2, jac_h3, jac_op, jac_slots = "p";
    jac->add_option("h1", jac_h1)->required();
    jac->add_option("h2", jac_h2)->required();
    jac->add_option("h3", jac_h3)->required();
    jac->add_option("--op", jac_op, "skew-adjoint operator")->required();
    jac->add_option("--slots", jac_slots, "slot names (default p)");

    // is-hamiltonian
    auto* ish = app.add_subcommand("is-hamiltonian", "decide whether an operator is Hamiltonian");
    std::string ish_op, ish_route = "master", ish_slots = "p";
    std::optional<int> ish_bound;
    bool ish_lifted = false;
    ish->add_option("--op", ish_op, "skew-adjoint operator")->required();
    ish->add_option("--route", ish_route, "master | involutive | both (default master)");
    ish->add_option("--order-bound", ish_bound, "ansatz order bound for the involutive route");
    ish->add_option("--slots", ish_slots, "slot names (default p)");
    ish->add_flag("--lifted", ish_lifted, "transport the formal covectors in the involutive route");

    // normal-form
    auto* nf = app.add_subcommand("normal-form", "horizontal-cohomology normal form of a density");
    std::string nf_expr;
    nf->add_option("expr", nf_expr, "density")->required();

    // selftest
    auto* st = app.add_subcommand("selftest", "randomized kernel cross-validation");
    std::uint64_t st_seed = 1;
    int st_cases = 25;
    st->add_option("--seed", st_seed, "random seed (default 1)");
    st->add_option("--cases", st_cases, "number of cases (default 25)");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 64;
    }

    try {
        Context ctx = g.context();

        if (*euler) {
            CyclicPoly f = parse_cyclic(ctx, euler_expr);
            Family fam;
            if (euler_var == "a")
                fam = Family::A;
            else if (euler_var == "b")
                fam = Family::B;
            else
                throw error("--var must be a or b");
            Side side;
            if (euler_side == "right")
                side = Side::Right;
            else if (euler_side == "left")
                side = Side::Left;
            else
                throw error("--side must be right or left");
            Tuple d = variational_derivative(ctx, f, fam, side);
            if (g.json) {
                Json j;
                j["schema"] = "ncvar-tuple/1";
                j["components"] = tuple_json(ctx, d);
                std::cout << j.dump() << "\n";
            } else {
                std::cout << render(ctx, d) << "\n";
            }
            return 0;
        }
        if (*adj) {
            auto slots = parse_slot_names(adj_slots);
            DiffOperator A = parse_operator(ctx, adj_op, slots);
            DiffOperator At = adjoint(ctx, A);
            if (g.json)
                std::cout << serialize(ctx, At).dump() << "\n";
            else
                std::cout << render_operator(ctx, At, slots) << "\n";
            return 0;
        }
        if (*cpl) {
            Tuple p = parse_tuple(ctx, cpl_p);
            Tuple phi = parse_tuple(ctx, cpl_phi);
            emit_poly(g, ctx, couple(ctx, p, phi));
            return 0;
        }
        if (*sch) {
            Multivector xi = multivector_from_density(ctx, parse_cyclic(ctx, sch_a));
            Multivector eta = multivector_from_density(ctx, parse_cyclic(ctx, sch_b));
            Multivector br = schouten(ctx, xi, eta);
            if (g.json) {
                Json j;
                j["schema"] = "ncvar-multivector/1";
                j["degree"] = br.degree;
                j["body"] = serialize(ctx, br.body);
                std::cout << j.dump() << "\n";
            } else {
                std::cout << render(ctx, br) << "\n";
            }
            return 0;
        }
        if (*ev) {
            Multivector xi = multivector_from_density(ctx, parse_cyclic(ctx, ev_expr));
            std::vector<Tuple> ps;
            for (const auto& s : ev_ps) ps.push_back(parse_tuple(ctx, s));
            emit_poly(g, ctx, evaluate(ctx, xi, ps));
            return 0;
        }
        if (*qf) {
            Multivector xi = multivector_from_density(ctx, parse_cyclic(ctx, qf_expr));
            OddField q = odd_field(ctx, xi);
            if (g.json) {
                Json j;
                j["schema"] = "ncvar-field/1";
                j["parity"] = q.parity;
                j["phi_a"] = tuple_json(ctx, q.phi_a);
                j["phi_b"] = tuple_json(ctx, q.phi_b);
                std::cout << j.dump() << "\n";
            } else {
                std::cout << "phi_a: " << render(ctx, q.phi_a) << "\n";
                std::cout << "phi_b: " << render(ctx, q.phi_b) << "\n";
            }
            return 0;
        }
        if (*poi) {
            DiffOperator A = parse_operator(ctx, poi_op, parse_slot_names(poi_slots));
            Functional h1 = normal_form(ctx, parse_cyclic(ctx, poi_h1));
            Functional h2 = normal_form(ctx, parse_cyclic(ctx, poi_h2));
            emit_poly(g, ctx, poisson_bracket(ctx, h1, h2, A));
            return 0;
        }
        if (*jac) {
            DiffOperator A = parse_operator(ctx, jac_op, parse_slot_names(jac_slots));
            Functional h1 = normal_form(ctx, parse_cyclic(ctx, jac_h1));
            Functional h2 = normal_form(ctx, parse_cyclic(ctx, jac_h2));
            Functional h3 = normal_form(ctx, parse_cyclic(ctx, jac_h3));
            emit_poly(g, ctx, jacobiator(ctx, h1, h2, h3, A));
            return 0;
        }
        if (*ish) {
            DiffOperator A = parse_operator(ctx, ish_op, parse_slot_names(ish_slots));
            std::optional<PoissonVerdict> master, invol;
            if (ish_route == "master" || ish_route == "both") master = check_master(ctx, A);
            if (ish_route == "involutive" || ish_route == "both") {
                InvolutiveOptions opt;
                opt.order_bound = ish_bound;
                opt.lifted_covectors = ish_lifted;
                invol = check_involutive(ctx, A, opt);
            }
            if (!master && !invol) throw error("--route must be master, involutive, or both");
            if (master && invol &&
                invol->outcome != PoissonVerdict::Outcome::Inconclusive &&
                master->outcome != invol->outcome) {
                std::cerr << "internal route disagreement\n";
                return 70;
            }
            const PoissonVerdict& v = master ? *master : *invol;
            const char* word = v.outcome == PoissonVerdict::Outcome::Hamiltonian ? "true"
                               : v.outcome == PoissonVerdict::Outcome::NotHamiltonian ? "false"
                                                                                      : "inconclusive";
            if (g.json) {
                Json j;
                j["schema"] = "ncvar-verdict/1";
                j["verdict"] = word;
                j["route"] = v.route == PoissonVerdict::Route::Master ? "master" : "involutive";
                j["residual"] = serialize(ctx, v.residual.body);
                if (v.witness)
                    j["witness"] = tuple_json(ctx, *v.witness);
                else
                    j["witness"] = nullptr;
                if (v.order_bound_used >= 0) j["order_bound"] = v.order_bound_used;
                std::cout << j.dump() << "\n";
            } else {
                std::cout << word << "\n";
            }
            switch (v.outcome) {
                case PoissonVerdict::Outcome::Hamiltonian: return 0;
                case PoissonVerdict::Outcome::NotHamiltonian: return 1;
                case PoissonVerdict::Outcome::Inconclusive: return 2;
            }
            return 70;
        }
        if (*nf) {
            emit_poly(g, ctx, normal_form(ctx, parse_cyclic(ctx, nf_expr)));
            return 0;
        }
        if (*st) {
            auto rep = ncvar::testkit::selftest(st_seed, st_cases);
            if (g.json) {
                Json j;
                j["schema"] = "ncvar-selftest/1";
                j["cases"] = rep.cases;
                j["failures"] = rep.failures;
                if (!rep.first_failure.empty()) j["first_failure"] = rep.first_failure;
                std::cout << j.dump() << "\n";
            } else {
                std::cout << "selftest: " << rep.cases << " cases, " << rep.failures << " failures\n";
                if (!rep.ok()) std::cout << "first failure: " << rep.first_failure << "\n";
            }
            return rep.ok() ? 0 : 1;
        }
        throw error("no subcommand selected");
    } catch (const not_skew_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 65;
    } catch (const ncvar::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 65;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 70;
    }
}
