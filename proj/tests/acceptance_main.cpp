// Runs the acceptance criteria and prints one result block per criterion.
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ipdsaw/acceptance.hpp"
#include "ipdsaw/parallel.hpp"

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<std::string> only;
    unsigned threads = ipdsaw::default_threads();
    bool quick = false;
    app.add_option("--only", only, "criterion ids, e.g. A3")->check(CLI::IsMember(ipdsaw::acceptance_ids()));
    app.add_option("--threads", threads, "worker cap");
    app.add_flag("--quick", quick, "quick subset");
    CLI11_PARSE(app, argc, argv);

    auto ids = only.empty() ? (quick ? ipdsaw::quick_acceptance_ids() : ipdsaw::acceptance_ids()) : only;
    int failed = 0;
    for (const auto& id : ids) {
        const auto r = ipdsaw::run_acceptance(id, threads);
        std::cout << ipdsaw::format_result(r) << std::flush;
        if (!r.pass()) ++failed;
    }
    std::cout << (ids.size() - failed) << "/" << ids.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
