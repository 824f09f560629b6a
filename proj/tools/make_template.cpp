// Regenerates the stock neck template: renders the default scene with all
// motion and noise disabled and crops the patch from the first frame.
#include <iostream>
#include <string>

#include "neckvitals/imaging.hpp"
#include "neckvitals/io.hpp"
#include "neckvitals/roi.hpp"
#include "neckvitals/scene.hpp"

using namespace neckvitals;

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_template <out.pgm>\n";
    return 64;
  }
  SceneSpec spec;
  spec.amplitudes = MotionAmplitudes{0.0, 0.0, 0.0, 0.0};
  spec.material.noise_amplitude = 0.0;
  spec.duration = 0.1;
  const SimulationResult result = run_scene(spec, TimeWindow{0.0, 0.05, 1.0});
  const PatchLayout layout;
  const Rect patch{layout.top, layout.left, layout.rows, layout.cols};
  const Frame cropped = crop(result.sequence.frames.front(), patch);
  const TemplateImage tmpl = build_template({cropped}, "default scene render");
  save_pgm(tmpl.image, argv[1]);
  std::cout << "wrote " << argv[1] << " (" << tmpl.image.width << "x" << tmpl.image.height
            << ")\n";
  return 0;
}
