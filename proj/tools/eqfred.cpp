#include <eqfred/cli.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char **argv) {
    using namespace eqfred;

    CLI::App app{"Equivariant symbol and Fredholm-proxy toolkit"};
    app.require_subcommand(1, 1);

    cli::Command cmd;
    std::string alpha, sizes, bc, out;

    auto common = [&](CLI::App *sub) {
        sub->add_option("--input", cmd.input, "input document (JSON)");
        sub->add_option("--out", out, "report path (default stdout)");
        sub->add_option("--tol", cmd.tol, "invertibility tolerance")->capture_default_str();
    };

    auto *check = app.add_subcommand("check", "alpha-ellipticity of a sampled symbol");
    common(check);
    check->add_option("--alpha", alpha, "character exponents a1,...,ak")->required();

    auto *dec = app.add_subcommand("decompose", "isotypical multiplicities of a representation");
    common(dec);

    auto *ind = app.add_subcommand("induce", "induce a subgroup representation to the group");
    common(ind);

    auto *prim = app.add_subcommand("prim", "orbit listing of X over the sample bundle");
    common(prim);

    auto *bvp = app.add_subcommand("bvp", "interval eigenvalues through doubling");
    common(bvp);
    bvp->add_option("--bc", bc, "left,right boundary conditions, each D or N")->required();
    bvp->add_option("--sizes", sizes, "grid sizes n1,n2,...");
    bvp->add_option("--count", cmd.count, "number of eigenvalues")->capture_default_str();

    auto *sweep = app.add_subcommand("sweep", "refinement sweep of a circle operator family");
    common(sweep);
    sweep->add_option("--scenario", cmd.scenario, "elliptic | alpha-elliptic | zero")
        ->capture_default_str();
    sweep->add_option("--alpha", alpha, "reflection character exponent: 0 or 1")->required();
    sweep->add_option("--sizes", sizes, "grid sizes n1,n2,...");
    sweep->add_option("--k", cmd.k, "singular value index")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? 0 : cli::kExitError;
    }

    const auto *sub = app.get_subcommands().front();
    cmd.verb = *cli::parse_verb(sub->get_name());
    try {
        if (!alpha.empty())
            cmd.alpha = cli::parse_int_list(alpha);
        if (!sizes.empty())
            cmd.sizes = cli::parse_int_list(sizes);
        if (!bc.empty())
            cmd.bc = cli::parse_bc(bc);
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kExitError;
    }

    const auto result = cli::run(cmd);
    if (result.exit_code == cli::kExitError) {
        std::cerr << result.diagnostic << "\n";
        return result.exit_code;
    }
    if (out.empty()) {
        std::cout << result.report;
    } else {
        std::ofstream f(out, std::ios::binary);
        if (!f) {
            std::cerr << "error: cannot write '" << out << "'\n";
            return cli::kExitError;
        }
        f << result.report;
    }
    return result.exit_code;
}
