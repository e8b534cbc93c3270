#include "fermat/scenario.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace fermat {

namespace {

using nlohmann::ordered_json;

ordered_json vec_json(const Vec& v) {
    ordered_json arr = ordered_json::array();
    for (int i = 0; i < v.size(); ++i)
        arr.push_back(v(i));
    return arr;
}

std::string hash_hex(std::uint64_t h) {
    std::ostringstream out;
    out << std::hex << std::setfill('0') << std::setw(16) << h;
    return out.str();
}

ordered_json ray_json(const RayResult& ray) {
    ordered_json j;
    j["id"] = ray.id;
    j["tau"] = ray.tau;
    j["index"] = ray.index;
    j["nondegenerate"] = ray.nondegenerate;
    ordered_json conj = ordered_json::array();
    for (const ConjugatePoint& c : ray.conjugate_points)
        conj.push_back({{"s", c.s}, {"multiplicity", c.multiplicity}});
    j["conjugate_points"] = conj;
    j["residual"] = ray.residual;
    j["endpoint_miss"] = ray.endpoint_miss;
    if (ray.hessian_index >= 0)
        j["hessian_index"] = ray.hessian_index;
    j["start"] = ray.start_hint;
    j["arrival_event"] = {{"x", vec_json(ray.geodesic.end().x)}, {"t", ray.geodesic.end().t}};
    j["launch_velocity"] = vec_json(ray.geodesic.v.front());
    j["warnings"] = ray.warnings;
    return j;
}

} // namespace

std::string report_json(const RunReport& report) {
    ordered_json j;
    j["scenario_hash"] = hash_hex(scenario_hash(report.scenario));
    j["scenario"] = nlohmann::ordered_json::parse(canonical_dump(report.scenario));

    ordered_json rays = ordered_json::array();
    for (const RayResult& ray : report.rays)
        rays.push_back(ray_json(ray));
    j["rays"] = rays;

    j["series"] = {{"counts", report.series.counts}, {"betti", report.series.betti}};
    j["relations"] = {{"consistent", report.relations.consistent},
                      {"partial_sums", report.relations.partial_sums},
                      {"first_violation", report.relations.first_violation},
                      {"excess", report.relations.excess}};
    j["parity"] = {{"consistent", report.parity.consistent},
                   {"message", report.parity.message}};
    if (report.convexity_probed) {
        j["convexity"] = {{"pair_violations", report.convexity.pair_violations},
                          {"grazing_violations", report.convexity.grazing_violations},
                          {"samples_checked", report.convexity.samples_checked}};
    }
    j["notes"] = report.notes;
    j["guard_abort"] = report.guard_abort;
    j["ledger_violated"] = report.ledger_violated;
    return j.dump(2) + "\n";
}

std::string ledger_text(const RunReport& report) {
    std::ostringstream out;
    out << "index audit\n";
    out << "===========\n";
    out << "scenario hash: " << hash_hex(scenario_hash(report.scenario)) << "\n\n";

    out << "rays found: " << report.rays.size() << "\n";
    for (const RayResult& ray : report.rays) {
        out << "  ray " << ray.id << ": arrival " << std::setprecision(12) << ray.tau
            << ", index " << ray.index
            << (ray.nondegenerate ? "" : " (degenerate)") << ", via " << ray.start_hint << "\n";
    }
    out << "\ncounts by index (c_l): ";
    for (std::size_t l = 0; l < report.series.counts.size(); ++l)
        out << (l ? " " : "") << report.series.counts[l];
    out << "\nreference profile (b_l): ";
    for (std::size_t l = 0; l < report.series.betti.size(); ++l)
        out << (l ? " " : "") << report.series.betti[l];
    out << "\nalternating partial sums (S_l): ";
    for (std::size_t l = 0; l < report.relations.partial_sums.size(); ++l)
        out << (l ? " " : "") << report.relations.partial_sums[l];
    out << "\n";
    if (report.relations.consistent) {
        out << "count relations: consistent (excess " << report.relations.excess << ")\n";
    } else {
        out << "count relations: VIOLATED at index " << report.relations.first_violation
            << " -- rays of that index are undercounted\n";
    }
    out << "parity: " << report.parity.message << "\n";
    if (report.convexity_probed) {
        out << "light-convexity probe: " << report.convexity.violations() << " violation(s) over "
            << report.convexity.samples_checked << " samples\n";
    }
    if (!report.notes.empty()) {
        out << "\nnotes:\n";
        for (const std::string& note : report.notes)
            out << "  - " << note << "\n";
    }
    return out.str();
}

void emit_outputs(const RunReport& report, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    auto write_file = [&](const std::string& name, const std::string& content) {
        std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
        if (!out)
            throw Error(ErrorCode::Io, "cannot write output file '" + name + "'");
        out << content;
    };

    write_file("report.json", report_json(report));
    write_file("ledger.txt", ledger_text(report));

    {
        std::ostringstream csv;
        csv << "id,tau,index,nondegenerate,residual,endpoint_miss,conjugate_count,start\n";
        csv << std::setprecision(17);
        for (const RayResult& ray : report.rays) {
            csv << ray.id << ',' << ray.tau << ',' << ray.index << ','
                << (ray.nondegenerate ? 1 : 0) << ',' << ray.residual << ','
                << ray.endpoint_miss << ',' << ray.conjugate_points.size() << ','
                << '"' << ray.start_hint << '"' << "\n";
        }
        write_file("rays.csv", csv.str());
    }

    for (const RayResult& ray : report.rays) {
        std::ostringstream csv;
        const int n = ray.geodesic.z.empty() ? 0 : static_cast<int>(ray.geodesic.z.front().x.size());
        csv << "s";
        for (int d = 0; d < n; ++d)
            csv << ",x" << d;
        csv << ",t";
        for (int d = 0; d < n; ++d)
            csv << ",v" << d;
        csv << ",vt\n";
        csv << std::setprecision(17);
        const int samples = ray.geodesic.samples();
        const int stride = std::max(1, samples / 512);
        for (int i = 0; i < samples; i += stride) {
            csv << ray.geodesic.s[i];
            for (int d = 0; d < n; ++d)
                csv << ',' << ray.geodesic.z[i].x(d);
            csv << ',' << ray.geodesic.z[i].t;
            for (int d = 0; d < n; ++d)
                csv << ',' << ray.geodesic.v[i](d);
            csv << ',' << ray.geodesic.v[i](n) << "\n";
        }
        if ((samples - 1) % stride != 0) { // keep the arrival sample
            const int i = samples - 1;
            csv << ray.geodesic.s[i];
            for (int d = 0; d < n; ++d)
                csv << ',' << ray.geodesic.z[i].x(d);
            csv << ',' << ray.geodesic.z[i].t;
            for (int d = 0; d < n; ++d)
                csv << ',' << ray.geodesic.v[i](d);
            csv << ',' << ray.geodesic.v[i](n) << "\n";
        }
        write_file("ray_" + std::to_string(ray.id) + ".csv", csv.str());
    }

    {
        ordered_json t;
        for (const auto& [name, ms] : report.timings_ms)
            t[name] = ms;
        write_file("timings.json", t.dump(2) + "\n");
    }
}

} // namespace fermat
