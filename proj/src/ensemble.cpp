#include "cse/ensemble.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>

#include "cse/errors.hpp"
#include "cse/io.hpp"

namespace cse {

void CloudSpec::validate() const
{
    if (!(Lx > 0.0) || !(Ly > 0.0) || !(Lz > 0.0))
        throw ConfigError("cloud box edges must be positive");
    if (N == 0)
        throw ConfigError("cloud atom count must be at least 1");
    if (std::abs(dipole_axis.norm() - 1.0) > 1e-9)
        throw ConfigError("dipole_axis must be a unit vector");
    if (std::abs(laser_axis.norm() - 1.0) > 1e-9)
        throw ConfigError("laser_axis must be a unit vector");
}

UniformSource::UniformSource(std::uint64_t seed) : engine_(seed) {}

double UniformSource::next()
{
    // 53 high bits -> [0, 1) with full double resolution.
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

AtomPositions sample_cloud(const CloudSpec& spec)
{
    spec.validate();
    UniformSource rng(spec.seed);

    const Vec3 half(spec.Lx / 2, spec.Ly / 2, spec.Lz / 2);
    const double min_sq = kMinSeparation * kMinSeparation;

    AtomPositions out;
    out.positions.reserve(spec.N);
    while (out.positions.size() < spec.N) {
        Vec3 r;
        for (int a = 0; a < 3; ++a)
            r[a] = rng.next(-half[a], half[a]);

        bool clash = false;
        for (const Vec3& p : out.positions) {
            if ((p - r).squaredNorm() < min_sq) {
                clash = true;
                break;
            }
        }
        if (clash) {
            if (++out.resampled > 1000 * spec.N)
                throw ConfigError("cloud too dense: cannot place atoms at least " +
                                  format_number(kMinSeparation) + " wavelengths apart");
            std::clog << "[ensemble] seed " << spec.seed << ": atom " << out.positions.size()
                      << " within " << kMinSeparation << " lambda of another atom, resampled\n";
            continue;
        }
        out.positions.push_back(r);
    }
    return out;
}

double density(const CloudSpec& spec)
{
    spec.validate();
    return static_cast<double>(spec.N) / (spec.Lx * spec.Ly * spec.Lz);
}

double optical_depth(const CloudSpec& spec)
{
    return density(spec) * spec.Lx / (2.0 * std::numbers::pi);
}

void write_positions_csv(const AtomPositions& atoms, const std::filesystem::path& path)
{
    CsvWriter csv(path, {"atom_index", "x", "y", "z"});
    for (std::size_t i = 0; i < atoms.size(); ++i)
        csv.row(i, atoms[i].x(), atoms[i].y(), atoms[i].z());
}

}  // namespace cse
