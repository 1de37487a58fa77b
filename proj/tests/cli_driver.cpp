// Drives the installed CLI end to end through std::system: flatten ->
// embed -> featurize -> eval -> permute -> grid -> report, checking exit
// codes, output files, and idempotence. argv[1] is the binary under test.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int g_failures = 0;
std::string g_binary;
fs::path g_dir;

void check(bool ok, const std::string& what) {
    if (!ok) {
        std::cerr << "FAIL: " << what << "\n";
        ++g_failures;
    }
}

int run(const std::string& args, std::string* output = nullptr) {
    fs::path log = g_dir / "cmd.log";
    std::string cmd = "cd " + g_dir.string() + " && " + g_binary + " " + args + " > " +
                      log.string() + " 2>&1";
    int status = std::system(cmd.c_str());
    if (output) {
        std::ifstream in(log);
        std::ostringstream buf;
        buf << in.rdbuf();
        *output = buf.str();
    }
    if (status == -1) return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_driver <path-to-bugpred>\n";
        return 2;
    }
    g_binary = fs::absolute(argv[1]).string();
    g_dir = fs::temp_directory_path() / "bugpred_cli_test";
    fs::remove_all(g_dir);
    fs::create_directories(g_dir);

    write(g_dir / "src/alpha.java", R"(
        public class Alpha {
            public static boolean flag = true;
            void work(String input) {
                if (flag) { handler.accept(input); }
                done = true;
            }
        }
    )");
    write(g_dir / "src/beta.java", "class Beta { int size = 4; void touch() { size = 5; } }\n");
    write(g_dir / "src/gamma.tree",
          R"({"kind":"ClassDeclaration","children":[{"kind":"MethodDeclaration"},{"kind":"Mystery"}]})");
    write(g_dir / "src/broken.java", "class { oops\n");

    // flatten: one bad file -> partial exit, three documents still written
    std::string out;
    int code = run("flatten src --out corpus.txt", &out);
    check(code == 3, "flatten exits 3 when some inputs were skipped, got " + std::to_string(code));
    check(out.find("documents: 3") != std::string::npos, "flatten reports 3 documents");
    check(out.find("skipped") != std::string::npos, "flatten reports the skip");
    std::string corpus_a = slurp(g_dir / "corpus.txt");
    check(corpus_a.find("src.alpha#Alpha\t") != std::string::npos, "doc id from path and class");
    check(corpus_a.find("src.gamma\t") != std::string::npos, "tree file doc id");

    fs::remove(g_dir / "src/broken.java");
    code = run("flatten src --out corpus.txt", &out);
    check(code == 0, "flatten exits 0 on clean input");
    code = run("flatten src --out corpus2.txt", &out);
    check(slurp(g_dir / "corpus.txt") == slurp(g_dir / "corpus2.txt"),
          "flatten output is byte-identical across reruns");

    fs::create_directories(g_dir / "empty");
    code = run("flatten empty --out nothing.txt", &out);
    check(code == 2, "flatten exits 2 with no documents");

    // embed: usage error before training, then a real run, deterministic
    code = run("embed --corpus corpus.txt --dim 0 --model m.d2v --vectors v.csv", &out);
    check(code == 1, "embed --dim 0 is a usage error");
    code = run("embed --corpus corpus.txt --method pvdbow --dim 4 --window 2 --epochs 3 "
               "--seed 5 --model m.d2v --vectors v.csv",
               &out);
    check(code == 0, "embed runs");
    check(out.find("method=pvdbow") != std::string::npos, "embed echoes hyperparameters");
    code = run("embed --corpus corpus.txt --method pvdbow --dim 4 --window 2 --epochs 3 "
               "--seed 5 --model m2.d2v --vectors v2.csv",
               &out);
    check(slurp(g_dir / "v.csv") == slurp(g_dir / "v2.csv"),
          "embed vectors are identical for identical flags and seed");

    // labels and metrics keyed by the flattened doc ids
    write(g_dir / "labels.csv",
          "doc_id,bug_count\nsrc.alpha#Alpha,2\nsrc.beta#Beta,0\nsrc.gamma,1\n");
    write(g_dir / "metrics.csv",
          "doc_id,LOC,WMC\nsrc.alpha#Alpha,12,3\nsrc.beta#Beta,4,1\nsrc.gamma,40,9\n");

    code = run("featurize --vectors v.csv --metrics metrics.csv --labels labels.csv "
               "--mode combined --out features.csv",
               &out);
    check(code == 0, "featurize runs");
    check(out.find("join: 3 rows") != std::string::npos, "featurize prints the join report");
    std::string features = slurp(g_dir / "features.csv");
    check(features.rfind("doc_id,v0,v1,v2,v3,LOC,WMC,label", 0) == 0,
          "feature table header: embedding columns then metrics then label");

    code = run("featurize --labels labels.csv --mode embedding --out x.csv", &out);
    check(code == 2, "featurize without vectors for embedding mode is a data error");

    // eval needs at least k rows per class; synthesize a bigger corpus via
    // the tree format.
    fs::create_directories(g_dir / "many");
    for (int i = 0; i < 40; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "many/c%02d.tree", i);
        std::string kind = i % 2 == 0 ? "MethodDeclaration" : "FieldDeclaration";
        std::string body = R"({"kind":"ClassDeclaration","children":[)";
        for (int j = 0; j < 6 + (i % 5); ++j)
            body += (j ? "," : "") + std::string(R"({"kind":")") + kind + R"("})";
        body += "]}";
        write(g_dir / name, body);
    }
    std::ostringstream labels_csv;
    labels_csv << "doc_id,bug_count\n";
    for (int i = 0; i < 40; ++i) {
        char id[32];
        std::snprintf(id, sizeof(id), "many.c%02d", i);
        labels_csv << id << "," << (i % 2 == 0 ? 1 : 0) << "\n";
    }
    write(g_dir / "many_labels.csv", labels_csv.str());

    code = run("flatten many --out many.txt", &out);
    check(code == 0, "flatten the 40-document corpus");
    code = run("embed --corpus many.txt --method pvdbow --dim 4 --window 2 --epochs 10 --seed 3 "
               "--vectors many_v.csv",
               &out);
    check(code == 0, "embed the 40-document corpus");
    code = run("eval --vectors many_v.csv --labels many_labels.csv --mode embedding "
               "--classifier logistic,tree -k 4 --seed 9 --out-dir eval_out",
               &out);
    check(code == 0, "eval runs two classifiers, got " + std::to_string(code));
    check(fs::exists(g_dir / "eval_out/summary.txt"), "eval writes a summary");
    int report_files = 0;
    for (const auto& e : fs::directory_iterator(g_dir / "eval_out"))
        if (e.path().extension() == ".json") ++report_files;
    check(report_files == 2, "eval writes one report per classifier");

    code = run("permute --vectors many_v.csv --labels many_labels.csv --mode embedding "
               "--classifier logistic -n 3 -k 4 --seed 9 --workers 2 --out-dir perm_out",
               &out);
    check(code == 0, "permute runs");
    check(out.find("permutations: 3") != std::string::npos, "permute reports the count");
    report_files = 0;
    for (const auto& e : fs::directory_iterator(g_dir / "perm_out"))
        if (e.path().extension() == ".json") ++report_files;
    check(report_files == 3, "permute writes one report per permutation");

    code = run("grid --corpus many.txt --labels many_labels.csv --methods pvdbow --dims 3 "
               "--windows 2 --epochs 2,4 --classifiers logistic,naive_bayes -k 4 --seed 11 "
               "--workers 2 --out-dir grid_out",
               &out);
    check(code == 0, "grid runs, got " + std::to_string(code));
    check(out.find("cells: 4, failed: 0") != std::string::npos, "grid reports cell counts");
    std::string summary1 = slurp(g_dir / "grid_out/summary.txt");
    code = run("grid --corpus many.txt --labels many_labels.csv --methods pvdbow --dims 3 "
               "--windows 2 --epochs 2,4 --classifiers logistic,naive_bayes -k 4 --seed 11 "
               "--workers 1 --out-dir grid_out2",
               &out);
    check(slurp(g_dir / "grid_out2/summary.txt") == summary1,
          "grid summaries are byte-identical across worker counts");

    code = run("report grid_out --out combined_summary.txt", &out);
    check(code == 0, "report consumes a report directory");
    check(slurp(g_dir / "combined_summary.txt").find("logistic") != std::string::npos,
          "report mentions the classifier");

    // help text carries the defaults
    code = run("embed --help", &out);
    check(code == 0, "embed --help exits 0");
    check(out.find("--window") != std::string::npos, "help lists flags");
    check(out.find("12") != std::string::npos, "help shows the window default");
    code = run("definitely-not-a-command", &out);
    check(code == 1, "unknown subcommand is a usage error");
    code = run("eval --labels nonexistent.csv --mode metrics --classifier logistic "
               "--out-dir nowhere",
               &out);
    check(code == 2, "missing input file is a data error");

    if (g_failures == 0) {
        std::cout << "cli checks passed\n";
        fs::remove_all(g_dir);
        return 0;
    }
    std::cout << g_failures << " cli check(s) failed; artifacts kept in " << g_dir << "\n";
    return 1;
}
