import os
import tempfile

import hypothesis

# Keep test runs away from the user's settings and log directories
_scratch = tempfile.mkdtemp(prefix="qsplayer-tests-")
os.environ.setdefault("QSPLAYER_HOME", os.path.join(_scratch, "home"))
os.environ.setdefault("QSPLAYER_LOG_DIR", os.path.join(_scratch, "logs"))
os.environ.pop("QSPLAYER_GRID", None)

hypothesis.settings.register_profile("default", deadline=None, max_examples=25)
hypothesis.settings.register_profile("thorough", deadline=None, max_examples=200)
hypothesis.settings.register_profile("fast", deadline=None, max_examples=5)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))
