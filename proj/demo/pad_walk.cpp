// Walks the top edge of the pleasure/arousal square and prints how a few
// control units respond in continuous and discrete mode.

#include <cstdio>

#include "nmface/nmface.hpp"

int main() {
    using namespace nmface;
    const CornerPoseGrid grid = builtin_grid();
    std::printf("%6s  %-10s %8s %8s %8s\n", "p", "mode", "brow_low", "lip_pull", "lid_rais");
    for (int i = 0; i <= 8; ++i) {
        PleasureArousal pa{-1.0 + 0.25 * i, 1.0};
        for (MappingMode mode : {MappingMode::continuous, MappingMode::discrete}) {
            ActivationVector v = pa_to_pose(pa, grid, mode);
            std::printf("%6.2f  %-10s %8.3f %8.3f %8.3f\n", pa.p, std::string{mode_name(mode)}.c_str(),
                        v[Unit::brow_lowerer], v[Unit::lip_corner_puller], v[Unit::upper_lid_raiser]);
        }
    }
}
