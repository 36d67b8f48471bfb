import sys

from trig_inverse.main import main

sys.exit(main())
