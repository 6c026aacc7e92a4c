#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv)
{
    using namespace graphkms::cli;

    CLI::App app{"KMS weights of graph C*-algebras via sub-invariant vertex measures"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        auto* file = sub->add_option("--file", o.file, "Graph JSON file");
        auto* builtin = sub->add_option("--builtin", o.builtin, "Packaged example graph");
        file->excludes(builtin);
        sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "table"}));
    };
    auto with_q = [&](CLI::App* sub) { sub->add_option("--q", o.q, "q = e^beta as p or p/q")->required(); };

    auto* classify = app.add_subcommand("classify", "Regular/singular classification");
    common(classify);
    auto* transfer = app.add_subcommand("transfer", "Transfer matrix T = r_* s^*");
    common(transfer);
    auto* spectrum = app.add_subcommand("spectrum", "Values of q carrying nonzero sub-invariant measures");
    common(spectrum);
    spectrum->add_flag("--exact", o.exact, "Exact root isolation (all-regular finite graphs)");
    spectrum->add_option("--scan", o.scan, "qmin qmax steps")->expected(3);
    auto* solve = app.add_subcommand("solve", "Extreme rays of the sub-invariant cone");
    common(solve);
    with_q(solve);
    auto* tower = app.add_subcommand("tower", "Quasi-invariant measure tower from a seed");
    common(tower);
    with_q(tower);
    tower->add_option("--depth", o.depth, "Tower depth N");
    auto* seed_index = tower->add_option("--seed", o.seed, "Index of the seeding ray");
    tower->add_option("--seed-measure", o.seed_measure, "Seed vertex measure as JSON")->excludes(seed_index);
    auto* verify = app.add_subcommand("verify", "Round-trip every ray through its tower");
    common(verify);
    with_q(verify);
    verify->add_option("--depth", o.depth, "Tower depth N (default 3)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return Schema;
    }

    o.command = app.get_subcommands().front()->get_name();
    if (o.command == "verify" && verify->count("--depth") == 0)
        o.depth = 3;

    const auto out = run(o);
    if (out.report.contains("error")) {
        std::cerr << "error: " << out.table << '\n';
        if (o.format == "json")
            std::cout << out.report.dump(2) << '\n';
    } else if (o.format == "table") {
        std::cout << out.table;
    } else {
        std::cout << out.report.dump(2) << '\n';
    }
    return out.code;
}
