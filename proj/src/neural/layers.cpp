#include "carbospec/neural/layers.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "carbospec/errors.hpp"
#include "carbospec/kernels.hpp"
#include "carbospec/parallel.hpp"

namespace carbospec {

DenseLayer::DenseLayer(std::size_t in, std::size_t out)
    : w({in, out}, true), b({out}, true) {}

void DenseLayer::initHeUniform(Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(inDim()));
    for (double& v : w.data) v = rng.uniform(-limit, limit);
    for (double& v : b.data) v = 0.0;
}

Matrix DenseLayer::forward(const Matrix& x) const {
    if (x.cols() != inDim()) {
        throw Error(ErrorCode::ShapeMismatch,
                    "dense layer expects " + std::to_string(inDim()) + " inputs, got " +
                        std::to_string(x.cols()));
    }
    Matrix z(x.rows(), outDim());
    parallelFor(x.rows(), [&](std::size_t r0, std::size_t r1) {
        for (std::size_t i = r0; i < r1; ++i) {
            std::memcpy(z.row(i), b.data.data(), outDim() * sizeof(double));
        }
    });
    gemmNN(z.data().data(), x.data().data(), w.data.data(), x.rows(), inDim(), outDim());
    return z;
}

Matrix DenseLayer::backward(const Matrix& x, const Matrix& dz, bool needDx) {
    gemmTN(w.grad.data(), x.data().data(), dz.data().data(), x.rows(), inDim(), outDim());

    const Kernels& kr = kernels();
    for (std::size_t i = 0; i < dz.rows(); ++i) {
        kr.axpy(b.grad.data(), 1.0, dz.row(i), outDim());
    }

    Matrix dx(0, 0);
    if (needDx) {
        dx = Matrix(dz.rows(), inDim());
        // dX = dZ W^T: dot rows of dZ against weight rows.
        gemmNT(dx.data().data(), dz.data().data(), w.data.data(), dz.rows(), outDim(), inDim());
    }
    return dx;
}

void DenseLayer::forwardOne(const double* x, double* z) const {
    const Kernels& kr = kernels();
    std::memcpy(z, b.data.data(), outDim() * sizeof(double));
    for (std::size_t i = 0; i < inDim(); ++i) {
        kr.axpy(z, x[i], w.data.data() + i * outDim(), outDim());
    }
}

void DenseLayer::backwardOne(const double* x, const double* dz, double* dx, bool needDx) {
    const std::size_t in = inDim();
    const std::size_t out = outDim();
    const Kernels& kr = kernels();
    parallelFor(in, [&](std::size_t i0, std::size_t i1) {
        for (std::size_t i = i0; i < i1; ++i) {
            kr.axpy(w.grad.data() + i * out, x[i], dz, out);
            if (needDx) dx[i] = kr.dot(w.data.data() + i * out, dz, out);
        }
    });
    kr.axpy(b.grad.data(), 1.0, dz, out);
}

void reluForwardBuffer(double* out, const double* in, std::size_t n) {
    kernels().reluForward(out, in, n);
}

void reluBackwardBuffer(double* dIn, const double* activations, const double* dOut, std::size_t n) {
    kernels().reluBackward(dIn, activations, dOut, n);
}

Conv2dLayer::Conv2dLayer(std::size_t inChannels, std::size_t outChannels)
    : inC(inChannels), outC(outChannels), w({9 * inChannels, outChannels}, true), b({outChannels}, true) {}

void Conv2dLayer::initHeUniform(Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(9 * inC));
    for (double& v : w.data) v = rng.uniform(-limit, limit);
    for (double& v : b.data) v = 0.0;
}

namespace {

// Keep an output block of roughly this many doubles resident while weight
// rows stream through it.
constexpr std::size_t kConvTileDoubles = 2048;

inline std::size_t convTile(std::size_t channels) {
    const std::size_t t = kConvTileDoubles / channels;
    return t < 4 ? 4 : t;
}

// Valid output-x range [xlo, xhi) such that ix = x + kx - 1 stays in bounds.
inline void kxRange(std::size_t kx, std::size_t width, std::size_t& xlo, std::size_t& xhi) {
    xlo = kx == 0 ? 1 : 0;
    xhi = kx == 2 ? width - 1 : width;
}

} // namespace

void Conv2dLayer::forward(const double* in, std::size_t h, std::size_t wdt, double* out) const {
    const Kernels& kr = kernels();
    const std::size_t tile = convTile(outC);
    parallelFor(h, [&](std::size_t y0, std::size_t y1) {
        for (std::size_t y = y0; y < y1; ++y) {
            double* outRow = out + y * wdt * outC;
            for (std::size_t x = 0; x < wdt; ++x) {
                std::memcpy(outRow + x * outC, b.data.data(), outC * sizeof(double));
            }
            for (std::size_t xb = 0; xb < wdt; xb += tile) {
                const std::size_t xbEnd = xb + tile < wdt ? xb + tile : wdt;
                for (std::size_t ky = 0; ky < 3; ++ky) {
                    if (y + ky < 1 || y + ky - 1 >= h) continue;
                    const double* inRow = in + (y + ky - 1) * wdt * inC;
                    for (std::size_t kx = 0; kx < 3; ++kx) {
                        std::size_t xlo;
                        std::size_t xhi;
                        kxRange(kx, wdt, xlo, xhi);
                        if (xlo < xb) xlo = xb;
                        if (xhi > xbEnd) xhi = xbEnd;
                        for (std::size_t ci = 0; ci < inC; ++ci) {
                            const double* wRow = w.data.data() + ((ky * 3 + kx) * inC + ci) * outC;
                            for (std::size_t x = xlo; x < xhi; ++x) {
                                kr.axpy(outRow + x * outC, inRow[(x + kx - 1) * inC + ci], wRow, outC);
                            }
                        }
                    }
                }
            }
        }
    });
}

void Conv2dLayer::backwardData(const double* dOut, std::size_t h, std::size_t wdt, double* dIn) const {
    if (dIn == nullptr) return;
    // Transposed weight copy: rows indexed by (ky*3+kx)*outC + f, holding inC
    // contiguous values, so the gather below is axpy-shaped.
    std::vector<double> wt(w.data.size());
    for (std::size_t tap = 0; tap < 9; ++tap) {
        for (std::size_t ci = 0; ci < inC; ++ci) {
            for (std::size_t f = 0; f < outC; ++f) {
                wt[(tap * outC + f) * inC + ci] = w.data[(tap * inC + ci) * outC + f];
            }
        }
    }
    const Kernels& kr = kernels();
    const std::size_t tile = convTile(inC);
    parallelFor(h, [&](std::size_t y0, std::size_t y1) {
        for (std::size_t iy = y0; iy < y1; ++iy) {
            double* dInRow = dIn + iy * wdt * inC;
            std::memset(dInRow, 0, wdt * inC * sizeof(double));
            for (std::size_t xb = 0; xb < wdt; xb += tile) {
                const std::size_t xbEnd = xb + tile < wdt ? xb + tile : wdt;
                for (std::size_t ky = 0; ky < 3; ++ky) {
                    // out row that consumed this input row through tap ky
                    if (iy + 1 < ky || iy + 1 - ky >= h) continue;
                    const double* dOutRow = dOut + (iy + 1 - ky) * wdt * outC;
                    for (std::size_t kx = 0; kx < 3; ++kx) {
                        // ox = x - kx + 1 must stay in [0, wdt)
                        std::size_t xlo = kx > 1 ? kx - 1 : 0;
                        std::size_t xhi = kx == 0 ? wdt - 1 : wdt;
                        if (xlo < xb) xlo = xb;
                        if (xhi > xbEnd) xhi = xbEnd;
                        for (std::size_t f = 0; f < outC; ++f) {
                            const double* wtRow = wt.data() + ((ky * 3 + kx) * outC + f) * inC;
                            for (std::size_t x = xlo; x < xhi; ++x) {
                                kr.axpy(dInRow + x * inC, dOutRow[(x - kx + 1) * outC + f], wtRow, inC);
                            }
                        }
                    }
                }
            }
        }
    });
}

void Conv2dLayer::backwardParams(const double* in, const double* dOut, std::size_t h, std::size_t wdt) {
    const Kernels& kr = kernels();
    const std::size_t tile = convTile(outC);
    // Three tasks, one per kernel row: each owns a disjoint slab of w.grad.
    parallelFor(3, [&](std::size_t ky0, std::size_t ky1) {
        for (std::size_t ky = ky0; ky < ky1; ++ky) {
            for (std::size_t y = 0; y < h; ++y) {
                if (y + ky < 1 || y + ky - 1 >= h) continue;
                const double* inRow = in + (y + ky - 1) * wdt * inC;
                const double* dOutRow = dOut + y * wdt * outC;
                for (std::size_t xb = 0; xb < wdt; xb += tile) {
                    const std::size_t xbEnd = xb + tile < wdt ? xb + tile : wdt;
                    for (std::size_t kx = 0; kx < 3; ++kx) {
                        std::size_t xlo;
                        std::size_t xhi;
                        kxRange(kx, wdt, xlo, xhi);
                        if (xlo < xb) xlo = xb;
                        if (xhi > xbEnd) xhi = xbEnd;
                        for (std::size_t ci = 0; ci < inC; ++ci) {
                            double* gRow = w.grad.data() + ((ky * 3 + kx) * inC + ci) * outC;
                            for (std::size_t x = xlo; x < xhi; ++x) {
                                kr.axpy(gRow, inRow[(x + kx - 1) * inC + ci], dOutRow + x * outC, outC);
                            }
                        }
                    }
                }
            }
        }
    });
    for (std::size_t y = 0; y < h; ++y) {
        const double* dOutRow = dOut + y * wdt * outC;
        for (std::size_t x = 0; x < wdt; ++x) {
            kr.axpy(b.grad.data(), 1.0, dOutRow + x * outC, outC);
        }
    }
}

void MaxPool3::forward(const double* in, std::size_t h, std::size_t w, std::size_t c,
                       double* out, std::int32_t* argIndex) {
    const std::size_t oh = outDim(h);
    const std::size_t ow = outDim(w);
    parallelFor(oh, [&](std::size_t p0, std::size_t p1) {
        for (std::size_t py = p0; py < p1; ++py) {
            for (std::size_t px = 0; px < ow; ++px) {
                double* outPx = out + (py * ow + px) * c;
                std::int32_t* argPx = argIndex + (py * ow + px) * c;
                for (std::size_t ch = 0; ch < c; ++ch) {
                    double best = -std::numeric_limits<double>::infinity();
                    std::int32_t bestIdx = 0;
                    for (std::size_t ky = 0; ky < 3; ++ky) {
                        for (std::size_t kx = 0; kx < 3; ++kx) {
                            const std::size_t idx = ((3 * py + ky) * w + (3 * px + kx)) * c + ch;
                            if (in[idx] > best) {
                                best = in[idx];
                                bestIdx = static_cast<std::int32_t>(idx);
                            }
                        }
                    }
                    outPx[ch] = best;
                    argPx[ch] = bestIdx;
                }
            }
        }
    });
}

void MaxPool3::backward(const double* dOut, std::size_t h, std::size_t w, std::size_t c,
                        const std::int32_t* argIndex, double* dIn) {
    const std::size_t oh = outDim(h);
    const std::size_t ow = outDim(w);
    std::memset(dIn, 0, h * w * c * sizeof(double));
    // Windows are disjoint (stride == size), so each dIn slot is written by at
    // most one output and rows of outputs touch disjoint input rows.
    parallelFor(oh, [&](std::size_t p0, std::size_t p1) {
        for (std::size_t py = p0; py < p1; ++py) {
            const double* dRow = dOut + py * ow * c;
            const std::int32_t* aRow = argIndex + py * ow * c;
            for (std::size_t i = 0; i < ow * c; ++i) {
                dIn[aRow[i]] += dRow[i];
            }
        }
    });
}

} // namespace carbospec
