#include "polymix/vec.hpp"

namespace polymix {
namespace {

// Gram-Schmidt over the seeds followed by the coordinate axes.
std::array<Vec, kMaxDim> complete(std::array<Vec, kMaxDim> frame, int have)
{
    const int d = frame[0].dim();
    for (int axis = 0; axis < d && have < d; ++axis) {
        Vec c = Vec::unit(d, axis);
        for (int k = 0; k < have; ++k)
            c -= dot(c, frame[k]) * frame[k];
        double n = norm(c);
        if (n > 1e-6)
            frame[have++] = c * (1.0 / n);
    }
    return frame;
}

}  // namespace

std::array<Vec, kMaxDim> orthonormal_frame(const Vec& axis)
{
    std::array<Vec, kMaxDim> frame;
    frame[0] = axis;
    return complete(frame, 1);
}

std::array<Vec, kMaxDim> orthonormal_frame(const Vec& first, const Vec& toward)
{
    std::array<Vec, kMaxDim> frame;
    frame[0] = first;
    Vec c = toward - dot(toward, first) * first;
    double n = norm(c);
    if (n > 1e-12 * (1.0 + norm(toward))) {
        frame[1] = c * (1.0 / n);
        return complete(frame, 2);
    }
    return complete(frame, 1);
}

}  // namespace polymix
