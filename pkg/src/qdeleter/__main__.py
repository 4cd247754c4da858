from qdeleter.cli import main

raise SystemExit(main())
